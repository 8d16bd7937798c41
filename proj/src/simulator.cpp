#include "stiffsim/simulator.hpp"

#include <stdexcept>

namespace stiffsim {

Simulator::Simulator(std::shared_ptr<const Model> model, IntegratorSetup setup,
                     std::vector<ContactPointState> contacts, RobotState state,
                     double time)
    : model_(std::move(model)), setup_(setup) {
  if (!model_) throw std::invalid_argument("simulator needs a model");
  reset(std::move(state), std::move(contacts), time);
}

void Simulator::reset(RobotState state, std::vector<ContactPointState> contacts,
                      double time) {
  const ModelInfo& mi = model_->info();
  if (state.q.size() != mi.nq || state.v.size() != mi.nv) {
    throw std::invalid_argument("state dimensions do not match " + mi.name);
  }
  if (int(contacts.size()) != mi.nc) {
    throw std::invalid_argument("contact count does not match " + mi.name);
  }
  state_ = std::move(state);
  contacts_ = std::move(contacts);
  time_ = time;
  report_ = StepReport{};
}

const StepReport& Simulator::step(const Eigen::VectorXd& tau, double dt) {
  StepResult r = stiffsim::step(setup_, *model_, contacts_, state_, tau, dt);
  state_ = std::move(r.state);
  report_ = std::move(r.report);
  time_ += dt;
  return report_;
}

double Simulator::max_speed() const {
  return state_.v.size() == 0 ? 0.0 : state_.v.cwiseAbs().maxCoeff();
}

}  // namespace stiffsim
