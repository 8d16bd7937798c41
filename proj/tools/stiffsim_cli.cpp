#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "stiffsim/config.hpp"
#include "stiffsim/errors.hpp"
#include "stiffsim/run.hpp"

int main(int argc, char** argv) {
  using namespace stiffsim;

  CLI::App app{"Stiff contact simulation benchmarks"};
  std::string command;
  std::string config_path;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> flags;

  std::string commands;
  for (const std::string& c : command_names()) {
    commands += (commands.empty() ? "" : ", ") + c;
  }
  app.add_option("command", command, commands);
  app.add_option("-c,--config", config_path, "key = value file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", assignments, "key=value override, repeatable");
  for (const std::string& key : config_keys()) {
    if (key == "command") continue;
    const std::string name = key.size() == 1 ? "-" + key : "--" + key;
    app.add_option(name, flags[key], "overrides '" + key + "'");
  }
  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) {
      std::cerr << "error: cannot read " << config_path << "\n";
      return kExitUsage;
    }
    text = buf.str();
  }

  RunConfig config;
  try {
    std::vector<KeyValue> overrides;
    for (const std::string& a : assignments) {
      overrides.push_back(split_assignment(a));
    }
    for (const auto& [key, value] : flags) {
      if (app.count(key.size() == 1 ? "-" + key : "--" + key) > 0) {
        overrides.emplace_back(key, value);
      }
    }
    if (!command.empty()) overrides.emplace_back("command", command);
    config = parse_config(text, overrides);
  } catch (const ConfigError& e) {
    for (const std::string& p : e.problems()) std::cerr << "error: " << p << "\n";
    return kExitUsage;
  }
  return run(config, std::cout);
}
