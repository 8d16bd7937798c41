#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "stiffsim/contact.hpp"
#include "stiffsim/integrators.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

// Owns one stepping context: a model, its contact states, the robot state
// and the simulated time.
class Simulator {
 public:
  Simulator(std::shared_ptr<const Model> model, IntegratorSetup setup,
            std::vector<ContactPointState> contacts, RobotState state,
            double time = 0.0);

  // Advances by dt with the input held constant. Propagates
  // IntegrationDivergedError.
  const StepReport& step(const Eigen::VectorXd& tau, double dt);

  void reset(RobotState state, std::vector<ContactPointState> contacts,
             double time);

  // Largest absolute generalized velocity.
  double max_speed() const;

  const Model& model() const { return *model_; }
  const IntegratorSetup& setup() const { return setup_; }
  const RobotState& state() const { return state_; }
  const std::vector<ContactPointState>& contacts() const { return contacts_; }
  double time() const { return time_; }
  const StepReport& last_report() const { return report_; }

 private:
  std::shared_ptr<const Model> model_;
  IntegratorSetup setup_;
  std::vector<ContactPointState> contacts_;
  RobotState state_;
  double time_;
  StepReport report_;
};

}  // namespace stiffsim
