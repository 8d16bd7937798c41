#include <stdexcept>

#include <Eigen/Geometry>

#include "quaternion.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

FreeBox3D::FreeBox3D(double mass, const Vec3& inertia_diag,
                     const Vec3& half_extents)
    : mass_(mass), inertia_(inertia_diag), half_extents_(half_extents) {
  if (!(mass > 0.0) || !(inertia_diag.minCoeff() > 0.0) ||
      !(half_extents.minCoeff() > 0.0)) {
    throw std::invalid_argument("box mass, inertia and extents must be positive");
  }
  const double a = half_extents.x();
  const double b = half_extents.y();
  const double c = half_extents.z();
  corners_ = {Vec3(a, b, -c), Vec3(a, -b, -c), Vec3(-a, -b, -c),
              Vec3(-a, b, -c)};
  info_.name = "free-box";
  info_.nq = 7;
  info_.nv = 6;
  info_.nc = 4;
  info_.contact_names = {"corner_fl", "corner_fr", "corner_rr", "corner_rl"};
  info_.actuated.assign(6, true);
  info_.quaternion_q = 3;
  info_.quaternion_v = 3;
}

FreeBox3D FreeBox3D::uniform(double mass, const Vec3& h) {
  const Vec3 inertia(mass * (h.y() * h.y() + h.z() * h.z()) / 3.0,
                     mass * (h.x() * h.x() + h.z() * h.z()) / 3.0,
                     mass * (h.x() * h.x() + h.y() * h.y()) / 3.0);
  return FreeBox3D(mass, inertia, h);
}

Eigen::VectorXd FreeBox3D::configuration(const Vec3& position, double roll,
                                         double pitch, double yaw) {
  const Eigen::Quaterniond rot =
      Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
      Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
      Eigen::AngleAxisd(roll, Vec3::UnitX());
  Eigen::VectorXd q(7);
  q << position, detail::quat_to_wxyz(rot.normalized());
  return q;
}

Eigen::MatrixXd FreeBox3D::mass_matrix(const Eigen::VectorXd&) const {
  Eigen::VectorXd d(6);
  d << mass_, mass_, mass_, inertia_;
  return d.asDiagonal();
}

Eigen::VectorXd FreeBox3D::nonlinear_and_actuation(
    const Eigen::VectorXd&, const Eigen::VectorXd& v,
    const Eigen::VectorXd& tau) const {
  const Vec3 w = v.segment<3>(3);
  Eigen::VectorXd u = tau;
  u(2) -= mass_ * kGravity;
  u.segment<3>(3) -= w.cross(inertia_.cwiseProduct(w));
  return u;
}

ContactKinematics FreeBox3D::contact_kinematics(
    const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
  const Eigen::Matrix3d rot =
      detail::quat_from_wxyz(q.segment<4>(3)).toRotationMatrix();
  const Vec3 lin = v.head<3>();
  const Vec3 w = v.segment<3>(3);
  ContactKinematics out(corners_.size());
  for (std::size_t i = 0; i < corners_.size(); ++i) {
    const Vec3& r = corners_[i];
    auto& k = out[i];
    k.p = q.head<3>() + rot * r;
    k.pdot = lin + rot * w.cross(r);
    k.jacobian.resize(3, 6);
    k.jacobian.leftCols<3>().setIdentity();
    k.jacobian.rightCols<3>() = -rot * detail::skew(r);
    k.drift = rot * w.cross(w.cross(r));
  }
  return out;
}

double FreeBox3D::potential_energy(const Eigen::VectorXd& q) const {
  return mass_ * kGravity * q(2);
}

}  // namespace stiffsim
