#pragma once

// Run configuration: flat `key = value` text plus command-line overrides.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stiffsim/integrators.hpp"
#include "stiffsim/scenarios.hpp"

namespace stiffsim {

struct RunConfig {
  std::string command;  // simulate, accuracy, sweep, stability, expm-bench
  std::string scenario;
  std::vector<std::string> integrators{"expo"};
  std::vector<double> dt_ms;  // empty: dt_c for simulate and expm-bench,
                              // otherwise the halving grid of dt_c
  std::optional<double> dt_c_ms;
  std::optional<double> stiffness;      // N/m
  std::optional<double> damping;        // N s/m
  std::optional<double> damping_ratio;  // B / (2 sqrt(K))
  double mu = 1.0;
  std::vector<std::string> mmm{"full"};
  std::optional<double> duration;  // s
  std::string output;              // empty: <scenario>_<command>.csv
  int repetitions = 3;
  std::vector<double> k_grid;   // sweep: K values at fixed damping ratio
  std::vector<double> xi_grid;  // sweep: damping ratios at K
  int samples = 100;            // expm-bench: contact systems per dt

  ScenarioOverrides overrides() const;
  // Every integrator crossed with the mmm list for expo.
  std::vector<IntegratorSetup> setups() const;
  // Step sizes in seconds.
  std::vector<double> dts(const Scenario& scenario) const;
  std::string output_name() const;
};

std::vector<std::string> config_keys();
std::vector<std::string> command_names();

using KeyValue = std::pair<std::string, std::string>;

// Parses the text, applies the overrides in order and validates the
// result. Throws ConfigError listing every problem found; syntax problems
// carry their line number.
RunConfig parse_config(std::string_view text,
                       const std::vector<KeyValue>& overrides = {});

// "key=value" as given on the command line.
KeyValue split_assignment(std::string_view text);

}  // namespace stiffsim
