#include <stdexcept>

#include "stiffsim/mechanics.hpp"

namespace stiffsim {

PointMass3D::PointMass3D(double mass) : mass_(mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  info_.name = "point-mass";
  info_.nq = 3;
  info_.nv = 3;
  info_.nc = 1;
  info_.contact_names = {"point"};
  info_.actuated = {true, true, true};
}

Eigen::MatrixXd PointMass3D::mass_matrix(const Eigen::VectorXd&) const {
  return mass_ * Eigen::MatrixXd::Identity(3, 3);
}

Eigen::VectorXd PointMass3D::nonlinear_and_actuation(
    const Eigen::VectorXd&, const Eigen::VectorXd&,
    const Eigen::VectorXd& tau) const {
  Eigen::VectorXd u = tau;
  u(2) -= mass_ * kGravity;
  return u;
}

ContactKinematics PointMass3D::contact_kinematics(
    const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
  ContactPointKinematics k;
  k.p = q.head<3>();
  k.pdot = v.head<3>();
  k.jacobian = Eigen::MatrixXd::Identity(3, 3);
  k.drift.setZero();
  return {k};
}

double PointMass3D::potential_energy(const Eigen::VectorXd& q) const {
  return mass_ * kGravity * q(2);
}

}  // namespace stiffsim
