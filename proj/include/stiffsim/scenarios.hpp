#pragma once

// Built-in benchmark scenarios: mass-drop, box-drop, box-push, hopper-squat
// and hopper-hop.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stiffsim/contact.hpp"
#include "stiffsim/controllers.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

struct Scenario {
  std::string name;
  std::shared_ptr<const Model> model;
  RobotState initial;
  ContactParams contact;
  double dt_c = 0.01;      // s
  double duration = 1.0;   // s
  Controller controller;   // empty: zero input

  std::vector<ContactPointState> initial_contacts() const;
  Eigen::VectorXd control(const RobotState& x, double t) const;
  // Number of control ticks, duration / dt_c rounded.
  int ticks() const;
};

// Values left unset keep the scenario defaults (K = 1e5, B = 300, mu = 1).
// Exactly one of damping and damping_ratio may be set.
struct ScenarioOverrides {
  std::optional<double> stiffness;
  std::optional<double> damping;
  std::optional<double> damping_ratio;
  std::optional<double> mu;
  std::optional<double> dt_c;
  std::optional<double> duration;
};

std::vector<std::string> scenario_names();

// Throws std::invalid_argument for unknown names or invalid overrides.
Scenario make_scenario(const std::string& name,
                       const ScenarioOverrides& overrides = {});

// Box used by the box scenarios: 0.5 kg, 20 x 20 x 10 cm, uniform density.
std::shared_ptr<const FreeBox3D> benchmark_box();

// Horizontal force applied by box-push, 1.5 mu m g.
double box_push_force(const Scenario& s);

// Knee reference of the hopper scenarios at time t.
double hopper_knee_reference(const std::string& scenario, double t);

}  // namespace stiffsim
