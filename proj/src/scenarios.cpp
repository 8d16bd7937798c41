#include "stiffsim/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stiffsim {

namespace {

constexpr double kBoxMass = 0.5;
const Vec3 kBoxHalfExtents(0.1, 0.1, 0.05);

constexpr double kHopperKnee = 0.8;        // rad, design stance
constexpr double kSquatAmplitude = 0.2;    // rad
constexpr double kSquatFrequency = 0.5;    // Hz
constexpr double kHopDropHeight = 0.03;    // m, foot above ground at t = 0
constexpr double kFlightClearance = 0.002; // m

ContactParams resolve_contact(const ScenarioOverrides& o) {
  if (o.damping && o.damping_ratio) {
    throw std::invalid_argument(
        "give either damping or damping_ratio, not both");
  }
  const double k = o.stiffness.value_or(1e5);
  const double mu = o.mu.value_or(1.0);
  if (!(k > 0)) throw std::invalid_argument("stiffness must be positive");
  if (!(mu >= 0)) throw std::invalid_argument("mu must be non-negative");
  if (o.damping_ratio) {
    if (!(*o.damping_ratio >= 0)) {
      throw std::invalid_argument("damping_ratio must be non-negative");
    }
    return ContactParams::from_damping_ratio(k, *o.damping_ratio, mu);
  }
  const double b = o.damping.value_or(300.0);
  if (!(b >= 0)) throw std::invalid_argument("damping must be non-negative");
  return ContactParams::isotropic(k, b, mu);
}

Scenario mass_drop() {
  Scenario s;
  s.model = std::make_shared<PointMass3D>(1.0);
  s.initial.q = Vec3(0.0, 0.0, 0.05);
  s.initial.v = Vec3::Zero();
  s.duration = 1.0;
  return s;
}

Scenario box_drop() {
  Scenario s;
  auto box = benchmark_box();
  s.model = box;
  const double roll = 0.1;
  const double pitch = 0.05;
  Eigen::VectorXd q = FreeBox3D::configuration(Vec3::Zero(), roll, pitch, 0.0);
  double lowest = 0.0;
  for (const auto& k : box->contact_kinematics(q, Eigen::VectorXd::Zero(6))) {
    lowest = std::min(lowest, k.p.z());
  }
  q(2) = 0.05 - lowest;
  s.initial.q = q;
  s.initial.v = Eigen::VectorXd::Zero(6);
  s.dt_c = 0.04;
  s.duration = 2.0;
  return s;
}

Scenario box_push(const ContactParams& contact) {
  Scenario s;
  auto box = benchmark_box();
  s.model = box;
  const double sink = box->mass() * kGravity / (4.0 * contact.stiffness.z());
  s.initial.q = FreeBox3D::configuration(
      Vec3(0.0, 0.0, box->half_extents().z() - sink), 0.0, 0.0, 0.0);
  s.initial.v = Eigen::VectorXd::Zero(6);
  s.duration = 0.5;
  return s;
}

}  // namespace

std::vector<ContactPointState> Scenario::initial_contacts() const {
  return make_contacts(model->info().nc, contact);
}

Eigen::VectorXd Scenario::control(const RobotState& x, double t) const {
  if (!controller) return model->zero_input();
  return controller(x, t);
}

int Scenario::ticks() const { return int(std::llround(duration / dt_c)); }

std::vector<std::string> scenario_names() {
  return {"mass-drop", "box-drop", "box-push", "hopper-squat", "hopper-hop"};
}

std::shared_ptr<const FreeBox3D> benchmark_box() {
  return std::make_shared<FreeBox3D>(
      FreeBox3D::uniform(kBoxMass, kBoxHalfExtents));
}

double box_push_force(const Scenario& s) {
  const auto* box = dynamic_cast<const FreeBox3D*>(s.model.get());
  if (!box) throw std::invalid_argument("box_push_force needs a box scenario");
  return 1.5 * s.contact.mu * box->mass() * kGravity;
}

double hopper_knee_reference(const std::string& scenario, double t) {
  if (scenario == "hopper-squat") {
    return kHopperKnee +
           kSquatAmplitude * std::sin(2.0 * std::numbers::pi * kSquatFrequency * t);
  }
  return kHopperKnee;
}

Scenario make_scenario(const std::string& name,
                       const ScenarioOverrides& overrides) {
  const ContactParams contact = resolve_contact(overrides);
  Scenario s;
  if (name == "mass-drop") {
    s = mass_drop();
  } else if (name == "box-drop") {
    s = box_drop();
  } else if (name == "box-push") {
    s = box_push(contact);
  } else if (name == "hopper-squat" || name == "hopper-hop") {
    auto hopper = std::make_shared<PlanarHopper>();
    s.model = hopper;
    const HopperStance stance =
        hopper_stance(*hopper, hopper_knee_reference(name, 0.0), contact);
    s.initial.q = stance.q;
    s.initial.v = Eigen::VectorXd::Zero(5);
    if (name == "hopper-hop") s.initial.q(1) += kHopDropHeight;
    s.duration = 2.0;
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  s.name = name;
  s.contact = contact;
  if (overrides.dt_c) s.dt_c = *overrides.dt_c;
  if (overrides.duration) s.duration = *overrides.duration;
  if (!(s.dt_c > 0)) throw std::invalid_argument("dt_c must be positive");
  if (!(s.duration >= s.dt_c)) {
    throw std::invalid_argument("duration must be at least dt_c");
  }

  if (name == "box-push") {
    const double force = box_push_force(s);
    s.controller = [force](const RobotState&, double) {
      Eigen::VectorXd tau = Eigen::VectorXd::Zero(6);
      tau(0) = force;
      return tau;
    };
  } else if (name == "hopper-squat" || name == "hopper-hop") {
    auto hopper = std::static_pointer_cast<const PlanarHopper>(s.model);
    auto lqr = std::make_shared<HopperBalanceController>(hopper, contact,
                                                         s.dt_c, kHopperKnee);
    PdGains hold;
    hold.q_des = hopper_stance(*hopper, kHopperKnee, contact).q;
    hold.kp = Eigen::VectorXd::Constant(5, 2.0);
    hold.kd = Eigen::VectorXd::Constant(5, 0.05);
    s.controller = [hopper, lqr, hold, name](const RobotState& x, double t) {
      if (hopper->foot_position(x.q).y() > kFlightClearance) {
        return pd_controller(*hopper, hold, x);
      }
      return (*lqr)(x, hopper_knee_reference(name, t));
    };
  }
  return s;
}

}  // namespace stiffsim
