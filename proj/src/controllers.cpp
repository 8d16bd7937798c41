#include "stiffsim/controllers.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "stiffsim/expm.hpp"
#include "stiffsim/integrators.hpp"

namespace stiffsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd pd_controller(const Model& model, const PdGains& gains,
                       const RobotState& x) {
  const ModelInfo& mi = model.info();
  const VectorXd err = model.difference_configuration(gains.q_des, x.q);
  VectorXd tau = VectorXd::Zero(mi.nv);
  for (int i = 0; i < mi.nv; ++i) {
    if (mi.actuated[i]) tau(i) = gains.kp(i) * err(i) - gains.kd(i) * x.v(i);
  }
  return tau;
}

HopperStance hopper_stance(const PlanarHopper& hopper, double knee,
                           const ContactParams& contact) {
  VectorXd q = VectorXd::Zero(5);
  q(4) = knee;
  q(3) = -0.5 * knee;
  auto imbalance = [&](double hip) {
    VectorXd qq = q;
    qq(3) = hip;
    return hopper.center_of_mass(qq).x() - hopper.foot_position(qq).x();
  };
  for (int it = 0; it < 50; ++it) {
    const double f = imbalance(q(3));
    if (std::abs(f) < 1e-14) break;
    const double h = 1e-7;
    const double df = (imbalance(q(3) + h) - imbalance(q(3) - h)) / (2 * h);
    q(3) -= f / df;
  }
  const double weight = hopper.total_mass() * kGravity;
  const Eigen::Vector2d foot = hopper.foot_position(q);
  q(0) -= foot.x();
  q(1) -= foot.y() + weight / contact.stiffness.z();

  HopperStance out;
  out.q = q;
  out.foot_force = Vec3(0.0, 0.0, weight);
  const VectorXd zero = VectorXd::Zero(5);
  const auto kin = hopper.contact_kinematics(q, zero);
  const VectorXd residual = hopper.nonlinear_and_actuation(q, zero, zero) +
                            kin[0].jacobian.transpose() * out.foot_force;
  out.tau = VectorXd::Zero(5);
  out.tau(3) = -residual(3);
  out.tau(4) = -residual(4);
  return out;
}

MatrixXd discrete_lqr(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                      const MatrixXd& r) {
  MatrixXd p = q;
  for (int it = 0; it < 100000; ++it) {
    const MatrixXd btp = b.transpose() * p;
    const MatrixXd gain = (r + btp * b).ldlt().solve(btp * a);
    MatrixXd next = q + a.transpose() * p * (a - b * gain);
    next = 0.5 * (next + next.transpose());
    const double change = (next - p).norm();
    p = std::move(next);
    if (change <= 1e-11 * p.norm()) break;
  }
  const MatrixXd btp = b.transpose() * p;
  return (r + btp * b).ldlt().solve(btp * a);
}

HopperBalanceController::HopperBalanceController(
    std::shared_ptr<const PlanarHopper> hopper, const ContactParams& contact,
    double dt_c, double design_knee)
    : hopper_(std::move(hopper)), contact_(contact) {
  if (!hopper_) throw std::invalid_argument("controller needs a hopper");
  if (!(dt_c > 0)) throw std::invalid_argument("dt_c must be positive");
  const HopperStance ref = hopper_stance(*hopper_, design_knee, contact_);
  std::vector<ContactPointState> contacts = make_contacts(1, contact_);
  contacts[0].active = true;

  const int n = 10;
  auto flow = [&](const VectorXd& z, const VectorXd& tau) {
    return continuous_dynamics(*hopper_, contacts,
                               RobotState{z.head(5), z.tail(5)}, tau);
  };
  VectorXd z0(n);
  z0 << ref.q, VectorXd::Zero(5);
  MatrixXd ac(n, n), bc(n, 2);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6;
    VectorXd zp = z0, zm = z0;
    zp(j) += h;
    zm(j) -= h;
    ac.col(j) = (flow(zp, ref.tau) - flow(zm, ref.tau)) / (2 * h);
  }
  for (int j = 0; j < 2; ++j) {
    const double h = 1e-4;
    VectorXd tp = ref.tau, tm = ref.tau;
    tp(3 + j) += h;
    tm(3 + j) -= h;
    bc.col(j) = (flow(z0, tp) - flow(z0, tm)) / (2 * h);
  }

  MatrixXd aug = MatrixXd::Zero(n + 2, n + 2);
  aug.topLeftCorner(n, n) = ac;
  aug.topRightCorner(n, 2) = bc;
  const MatrixXd e = pade_expm(dt_c * aug);
  const MatrixXd ad = e.topLeftCorner(n, n);
  const MatrixXd bd = e.topRightCorner(n, 2);

  VectorXd qw(n);
  qw << 100, 100, 100, 10, 10, 1, 1, 1, 0.1, 0.1;
  const MatrixXd rw = 0.01 * MatrixXd::Identity(2, 2);
  gain_ = discrete_lqr(ad, bd, qw.asDiagonal(), rw);
  radius_ = (ad - bd * gain_).eigenvalues().cwiseAbs().maxCoeff();
}

VectorXd HopperBalanceController::operator()(const RobotState& x,
                                             double knee_ref) const {
  const HopperStance ref = hopper_stance(*hopper_, knee_ref, contact_);
  VectorXd q_ref = ref.q;
  const Eigen::Vector2d foot_now = hopper_->foot_position(x.q);
  const Eigen::Vector2d foot_ref = hopper_->foot_position(ref.q);
  q_ref.head<2>() += foot_now - foot_ref;
  VectorXd dz(10);
  dz << x.q - q_ref, x.v;
  VectorXd tau = ref.tau;
  tau.segment<2>(3) -= gain_ * dz;
  return tau;
}

}  // namespace stiffsim
