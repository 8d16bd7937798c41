#pragma once

// Scalar-first quaternion helpers shared by the model implementations.

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace stiffsim::detail {

inline Eigen::Quaterniond quat_from_wxyz(const Eigen::Vector4d& wxyz) {
  return Eigen::Quaterniond(wxyz(0), wxyz(1), wxyz(2), wxyz(3));
}

inline Eigen::Vector4d quat_to_wxyz(const Eigen::Quaterniond& q) {
  return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
}

// Unit quaternion of the rotation by |w| about w/|w|.
inline Eigen::Quaterniond quat_exp(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-12) {
    return Eigen::Quaterniond(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z())
        .normalized();
  }
  const double s = std::sin(0.5 * angle) / angle;
  return Eigen::Quaterniond(std::cos(0.5 * angle), s * w.x(), s * w.y(),
                            s * w.z());
}

// Rotation vector of q, taking the short way round (angle in [0, pi]).
inline Eigen::Vector3d quat_log(Eigen::Quaterniond q) {
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const double n = q.vec().norm();
  if (n < 1e-12) return 2.0 * q.vec() / q.w();
  return (2.0 * std::atan2(n, q.w()) / n) * q.vec();
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

}  // namespace stiffsim::detail
