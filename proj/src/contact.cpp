#include "stiffsim/contact.hpp"

#include <cmath>
#include <stdexcept>

namespace stiffsim {

namespace {
// Relative slack on the cone test so that a force already rescaled onto the
// boundary is recognised as inside despite rounding.
constexpr double kConeSlack = 1e-14;
}  // namespace

ContactParams ContactParams::isotropic(double k, double b, double mu) {
  if (!(k > 0.0) || !(b >= 0.0) || !(mu >= 0.0)) {
    throw std::invalid_argument("contact needs K > 0, B >= 0, mu >= 0");
  }
  return ContactParams{Vec3::Constant(k), Vec3::Constant(b), mu};
}

ContactParams ContactParams::from_damping_ratio(double k, double xi,
                                                double mu) {
  return isotropic(k, damping_from_ratio(k, xi), mu);
}

double damping_from_ratio(double k, double xi) {
  return 2.0 * xi * std::sqrt(k);
}

double damping_ratio(double k, double b) { return b / (2.0 * std::sqrt(k)); }

std::vector<ContactPointState> make_contacts(int count,
                                             const ContactParams& params) {
  ContactPointState proto;
  proto.stiffness = params.stiffness;
  proto.damping = params.damping;
  proto.mu = params.mu;
  return std::vector<ContactPointState>(count, proto);
}

void detect_and_update(const ContactKinematics& kin,
                       std::vector<ContactPointState>& contacts) {
  if (kin.size() != contacts.size()) {
    throw std::invalid_argument("contact list does not match the model");
  }
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    ContactPointState& cp = contacts[i];
    const Vec3& p = kin[i].p;
    if (!cp.active && p.z() < 0.0) {
      cp.active = true;
      cp.anchor = Vec3(p.x(), p.y(), 0.0);
      cp.anchor_velocity.setZero();
    } else if (cp.active && p.z() > 0.0) {
      cp.active = false;
    }
  }
}

void detect_and_update(const Model& model, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& v,
                       std::vector<ContactPointState>& contacts) {
  detect_and_update(model.contact_kinematics(q, v), contacts);
}

Vec3 spring_damper_force(const ContactPointState& cp, const Vec3& p,
                         const Vec3& pdot) {
  return -cp.stiffness.cwiseProduct(p - cp.anchor) -
         cp.damping.cwiseProduct(pdot - cp.anchor_velocity);
}

FrictionConeCheck project_friction_cone(const Vec3& f, double mu) {
  if (f.z() < 0.0) return {false, Vec3::Zero()};
  const double tangential = std::hypot(f.x(), f.y());
  const double bound = mu * f.z();
  if (tangential <= bound * (1.0 + kConeSlack)) return {true, f};
  const double s = bound / tangential;
  return {false, Vec3(s * f.x(), s * f.y(), f.z())};
}

ContactPointState anchor_slip_update(const ContactPointState& cp,
                                     const Vec3& p, const Vec3& pdot,
                                     const Vec3& force_post) {
  ContactPointState out = cp;
  for (int i = 0; i < 2; ++i) {
    out.anchor_velocity(i) = pdot(i);
    out.anchor(i) = p(i) + force_post(i) / cp.stiffness(i);
  }
  return out;
}

}  // namespace stiffsim
