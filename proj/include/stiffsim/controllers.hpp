#pragma once

// Feedback controllers for the benchmark scenarios. Controllers are
// evaluated once per control tick and their output is held until the next.

#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "stiffsim/contact.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

// Input vector (length nv) from the state at a tick and the tick time.
using Controller =
    std::function<Eigen::VectorXd(const RobotState& x, double t)>;

struct PdGains {
  Eigen::VectorXd kp;     // per velocity coordinate
  Eigen::VectorXd kd;     // per velocity coordinate
  Eigen::VectorXd q_des;  // configuration
};

// kp (q_des (-) q) - kd v on the actuated coordinates, zero elsewhere.
Eigen::VectorXd pd_controller(const Model& model, const PdGains& gains,
                              const RobotState& x);

// Static stance of the hopper: body upright, given knee angle, whole-body
// centre of mass above the foot, foot at x = 0 sunk to the depth where the
// normal spring carries the weight. tau holds the joint torques.
struct HopperStance {
  Eigen::VectorXd q;
  Eigen::VectorXd tau;
  Vec3 foot_force;
};

HopperStance hopper_stance(const PlanarHopper& hopper, double knee,
                           const ContactParams& contact);

// Discrete LQR about a hopper stance, designed on the zero-order-hold
// discretization of the stance dynamics linearized with the foot contact
// active. Tracks the stance family for knee references near the design one.
class HopperBalanceController {
 public:
  HopperBalanceController(std::shared_ptr<const PlanarHopper> hopper,
                          const ContactParams& contact, double dt_c,
                          double design_knee);

  // Stance reference shifted so that its foot coincides with the current
  // foot, then tau_ref - K (x - x_ref).
  Eigen::VectorXd operator()(const RobotState& x, double knee_ref) const;

  const Eigen::MatrixXd& gain() const { return gain_; }
  // Spectral radius of the closed-loop discrete system at the design point.
  double closed_loop_radius() const { return radius_; }

 private:
  std::shared_ptr<const PlanarHopper> hopper_;
  ContactParams contact_;
  Eigen::MatrixXd gain_;  // 2 x 10
  double radius_ = 0.0;
};

// Solves the discrete algebraic Riccati equation by fixed-point iteration
// and returns K with u = -K x.
Eigen::MatrixXd discrete_lqr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

}  // namespace stiffsim
