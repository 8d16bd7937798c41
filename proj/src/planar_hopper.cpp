#include <cmath>
#include <stdexcept>

#include "stiffsim/mechanics.hpp"

namespace stiffsim {

namespace {

using Vec2 = Eigen::Vector2d;

// Unit vector of a link at absolute angle a, hanging along -z at a = 0.
Vec2 link_dir(double a) { return Vec2(std::sin(a), -std::cos(a)); }
// d/da link_dir(a)
Vec2 link_dir_rate(double a) { return Vec2(std::cos(a), std::sin(a)); }

// Point (x, z) + sum_k len[k] * link_dir(angle[k]) and its derivatives. The
// link angles are theta, theta + phi1, theta + phi1 + phi2, so link k depends
// on the first k + 1 angular coordinates.
struct ChainPoint {
  Vec2 pos;
  Eigen::Matrix<double, 2, 5> jac;
  Vec2 drift;
};

ChainPoint chain_point(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                       const double (&len)[3]) {
  const double angles[3] = {q(2), q(2) + q(3), q(2) + q(3) + q(4)};
  const double rates[3] = {v(2), v(2) + v(3), v(2) + v(3) + v(4)};
  ChainPoint out;
  out.pos = q.head<2>();
  out.jac.setZero();
  out.jac(0, 0) = 1.0;
  out.jac(1, 1) = 1.0;
  out.drift.setZero();
  for (int k = 0; k < 3; ++k) {
    if (len[k] == 0.0) continue;
    out.pos += len[k] * link_dir(angles[k]);
    const Vec2 d = len[k] * link_dir_rate(angles[k]);
    for (int j = 2; j <= 2 + k; ++j) out.jac.col(j) += d;
    out.drift -= len[k] * link_dir(angles[k]) * rates[k] * rates[k];
  }
  return out;
}

}  // namespace

PlanarHopper::PlanarHopper(const HopperParams& p) : params_(p) {
  if (!(p.body_mass > 0 && p.body_inertia > 0 && p.thigh_mass > 0 &&
        p.thigh_length > 0 && p.shank_mass > 0 && p.shank_length > 0)) {
    throw std::invalid_argument("hopper parameters must be positive");
  }
  info_.name = "planar-hopper";
  info_.nq = 5;
  info_.nv = 5;
  info_.nc = 1;
  info_.contact_names = {"foot"};
  info_.actuated = {false, false, false, true, true};
}

std::vector<PlanarHopper::Link> PlanarHopper::links(
    const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
  const double l1 = params_.thigh_length;
  const double l2 = params_.shank_length;
  const double body_len[3] = {0.0, 0.0, 0.0};
  const double thigh_len[3] = {0.0, 0.5 * l1, 0.0};
  const double shank_len[3] = {0.0, l1, 0.5 * l2};
  const ChainPoint body = chain_point(q, v, body_len);
  const ChainPoint thigh = chain_point(q, v, thigh_len);
  const ChainPoint shank = chain_point(q, v, shank_len);

  auto angular = [](int upto) {
    Eigen::Matrix<double, 1, 5> j = Eigen::Matrix<double, 1, 5>::Zero();
    for (int c = 2; c <= 2 + upto; ++c) j(c) = 1.0;
    return j;
  };
  return {
      {params_.body_mass, params_.body_inertia, body.pos, body.jac,
       body.drift, angular(0)},
      {params_.thigh_mass, params_.thigh_mass * l1 * l1 / 12.0, thigh.pos,
       thigh.jac, thigh.drift, angular(1)},
      {params_.shank_mass, params_.shank_mass * l2 * l2 / 12.0, shank.pos,
       shank.jac, shank.drift, angular(2)},
  };
}

Eigen::MatrixXd PlanarHopper::mass_matrix(const Eigen::VectorXd& q) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
  for (const Link& l : links(q, Eigen::VectorXd::Zero(5))) {
    m.noalias() += l.mass * l.jac.transpose() * l.jac;
    m.noalias() += l.inertia * l.angular_jac.transpose() * l.angular_jac;
  }
  return 0.5 * (m + m.transpose());
}

Eigen::VectorXd PlanarHopper::nonlinear_and_actuation(
    const Eigen::VectorXd& q, const Eigen::VectorXd& v,
    const Eigen::VectorXd& tau) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(5);
  u(3) = tau(3);
  u(4) = tau(4);
  for (const Link& l : links(q, v)) {
    const Vec2 force = l.mass * (Vec2(0.0, -kGravity) - l.drift);
    u.noalias() += l.jac.transpose() * force;
  }
  return u;
}

ContactKinematics PlanarHopper::contact_kinematics(
    const Eigen::VectorXd& q, const Eigen::VectorXd& v) const {
  const double foot_len[3] = {0.0, params_.thigh_length, params_.shank_length};
  const ChainPoint foot = chain_point(q, v, foot_len);
  ContactPointKinematics k;
  k.p = Vec3(foot.pos.x(), 0.0, foot.pos.y());
  k.jacobian = Eigen::MatrixXd::Zero(3, 5);
  k.jacobian.row(0) = foot.jac.row(0);
  k.jacobian.row(2) = foot.jac.row(1);
  const Vec2 vel = foot.jac * v;
  k.pdot = Vec3(vel.x(), 0.0, vel.y());
  k.drift = Vec3(foot.drift.x(), 0.0, foot.drift.y());
  return {k};
}

double PlanarHopper::potential_energy(const Eigen::VectorXd& q) const {
  double e = 0.0;
  for (const Link& l : links(q, Eigen::VectorXd::Zero(5))) {
    e += l.mass * kGravity * l.com.y();
  }
  return e;
}

double PlanarHopper::total_mass() const {
  return params_.body_mass + params_.thigh_mass + params_.shank_mass;
}

Eigen::Vector2d PlanarHopper::center_of_mass(const Eigen::VectorXd& q) const {
  Vec2 c = Vec2::Zero();
  for (const Link& l : links(q, Eigen::VectorXd::Zero(5))) c += l.mass * l.com;
  return c / total_mass();
}

Eigen::Vector2d PlanarHopper::foot_position(const Eigen::VectorXd& q) const {
  const auto k = contact_kinematics(q, Eigen::VectorXd::Zero(5));
  return Vec2(k[0].p.x(), k[0].p.z());
}

}  // namespace stiffsim
