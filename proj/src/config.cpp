#include "stiffsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stiffsim/bench.hpp"
#include "stiffsim/errors.hpp"

namespace stiffsim {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const std::string_view item = trim(s.substr(0, comma));
    if (item.empty()) throw std::invalid_argument("empty list entry");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("'" + std::string(s) + "' is not a number");
  }
  return v;
}

int to_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + std::string(s) + "' is not an integer");
  }
  return v;
}

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) out.push_back(to_double(item));
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command", [](RunConfig& c, std::string_view v) { c.command = v; }},
      {"scenario", [](RunConfig& c, std::string_view v) { c.scenario = v; }},
      {"integrators",
       [](RunConfig& c, std::string_view v) { c.integrators = split_list(v); }},
      {"dt", [](RunConfig& c, std::string_view v) { c.dt_ms = to_doubles(v); }},
      {"dt_c", [](RunConfig& c, std::string_view v) { c.dt_c_ms = to_double(v); }},
      {"K", [](RunConfig& c, std::string_view v) { c.stiffness = to_double(v); }},
      {"B", [](RunConfig& c, std::string_view v) { c.damping = to_double(v); }},
      {"damping_ratio",
       [](RunConfig& c, std::string_view v) { c.damping_ratio = to_double(v); }},
      {"mu", [](RunConfig& c, std::string_view v) { c.mu = to_double(v); }},
      {"mmm", [](RunConfig& c, std::string_view v) { c.mmm = split_list(v); }},
      {"duration",
       [](RunConfig& c, std::string_view v) { c.duration = to_double(v); }},
      {"output", [](RunConfig& c, std::string_view v) { c.output = v; }},
      {"repetitions",
       [](RunConfig& c, std::string_view v) { c.repetitions = to_int(v); }},
      {"k_grid",
       [](RunConfig& c, std::string_view v) { c.k_grid = to_doubles(v); }},
      {"xi_grid",
       [](RunConfig& c, std::string_view v) { c.xi_grid = to_doubles(v); }},
      {"samples", [](RunConfig& c, std::string_view v) { c.samples = to_int(v); }},
  };
  return table;
}

// Empty on success, otherwise the problem.
std::string assign(RunConfig& c, const std::string& key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) return "unknown key '" + key + "'";
  if (trim(value).empty()) return "empty value for '" + key + "'";
  try {
    it->second(c, trim(value));
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()) + " for '" + key + "'";
  }
  return {};
}

void validate(const RunConfig& c, std::vector<std::string>& problems) {
  const auto commands = command_names();
  if (c.command.empty()) {
    problems.push_back("command unspecified");
  } else if (std::find(commands.begin(), commands.end(), c.command) ==
             commands.end()) {
    problems.push_back("unknown command '" + c.command + "'");
  }

  if (!c.stiffness) {
    problems.push_back("stiffness unspecified");
  } else if (!(*c.stiffness > 0)) {
    problems.push_back("K must be positive");
  }
  if (!c.damping && !c.damping_ratio) problems.push_back("damping unspecified");
  if (c.damping && c.damping_ratio) {
    problems.push_back("give either B or damping_ratio, not both");
  }
  if (c.damping && !(*c.damping >= 0)) problems.push_back("B must be >= 0");
  if (c.damping_ratio && !(*c.damping_ratio >= 0)) {
    problems.push_back("damping_ratio must be >= 0");
  }
  if (!(c.mu >= 0)) problems.push_back("mu must be >= 0");
  if (c.repetitions < 1) problems.push_back("repetitions must be >= 1");
  if (c.samples < 1) problems.push_back("samples must be >= 1");
  if (c.duration && !(*c.duration > 0)) problems.push_back("duration must be positive");

  for (const std::string& name : c.integrators) {
    try {
      parse_integrator(name);
    } catch (const std::invalid_argument&) {
      problems.push_back("unknown integrator '" + name + "'");
    }
  }
  for (const std::string& m : c.mmm) {
    try {
      PadePolicy::parse(m);
    } catch (const std::invalid_argument&) {
      problems.push_back("mmm must be 'full' or 0..4, got '" + m + "'");
    }
  }
  for (double k : c.k_grid) {
    if (!(k > 0)) problems.push_back("k_grid entries must be positive");
  }
  for (double xi : c.xi_grid) {
    if (!(xi >= 0)) problems.push_back("xi_grid entries must be >= 0");
  }
  if (c.command == "sweep" && c.k_grid.empty() && c.xi_grid.empty()) {
    problems.push_back("sweep needs k_grid or xi_grid");
  }

  if (c.scenario.empty()) {
    problems.push_back("scenario unspecified");
    return;
  }
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
    problems.push_back("unknown scenario '" + c.scenario + "'");
    return;
  }
  if (c.dt_c_ms && !(*c.dt_c_ms > 0)) {
    problems.push_back("dt_c must be positive");
    return;
  }
  ScenarioOverrides o;
  if (c.dt_c_ms) o.dt_c = *c.dt_c_ms * 1e-3;
  const double dt_c = make_scenario(c.scenario, o).dt_c;
  for (double dt_ms : c.dt_ms) {
    std::ostringstream detail;
    detail << " (dt = " << dt_ms << " ms, dt_c = " << dt_c * 1e3 << " ms)";
    if (!(dt_ms > 0)) {
      problems.push_back("dt must be positive" + detail.str());
      continue;
    }
    try {
      steps_per_tick(dt_c, dt_ms * 1e-3);
    } catch (const std::invalid_argument&) {
      problems.push_back("dt must divide dt_c" + detail.str());
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems, "; ")), problems_(std::move(problems)) {}

ScenarioOverrides RunConfig::overrides() const {
  ScenarioOverrides o;
  o.stiffness = stiffness;
  o.damping = damping;
  o.damping_ratio = damping_ratio;
  o.mu = mu;
  if (dt_c_ms) o.dt_c = *dt_c_ms * 1e-3;
  o.duration = duration;
  return o;
}

std::vector<IntegratorSetup> RunConfig::setups() const {
  std::vector<IntegratorSetup> out;
  for (const std::string& name : integrators) {
    const IntegratorKind kind = parse_integrator(name);
    if (kind != IntegratorKind::kExpo) {
      out.push_back({kind, PadePolicy::full()});
      continue;
    }
    for (const std::string& m : mmm) out.push_back({kind, PadePolicy::parse(m)});
  }
  return out;
}

std::vector<double> RunConfig::dts(const Scenario& scenario) const {
  if (dt_ms.empty()) {
    if (command == "simulate" || command == "expm-bench") {
      return {scenario.dt_c};
    }
    return halving_grid(scenario.dt_c);
  }
  std::vector<double> out;
  for (double d : dt_ms) out.push_back(d * 1e-3);
  return out;
}

std::string RunConfig::output_name() const {
  if (!output.empty()) return output;
  return scenario + "_" + command + ".csv";
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, setter] : setters()) out.push_back(key);
  return out;
}

std::vector<std::string> command_names() {
  return {"simulate", "accuracy", "sweep", "stability", "expm-bench"};
}

KeyValue split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError({"expected key=value, got '" + std::string(text) + "'"});
  }
  return {std::string(trim(text.substr(0, eq))),
          std::string(trim(text.substr(eq + 1)))};
}

RunConfig parse_config(std::string_view text,
                       const std::vector<KeyValue>& overrides) {
  RunConfig c;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    const std::string err = assign(c, key, line.substr(eq + 1));
    if (!err.empty()) problems.push_back(where + err);
  }
  for (const auto& [key, value] : overrides) {
    const std::string err = assign(c, key, value);
    if (!err.empty()) problems.push_back("--" + key + ": " + err);
  }
  if (problems.empty()) validate(c, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

}  // namespace stiffsim
