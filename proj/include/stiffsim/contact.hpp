#pragma once

// Visco-elastic point contacts against the ground plane z = 0: activation,
// spring-damper force, Coulomb cone projection and anchor slip updates.

#include <vector>

#include "stiffsim/mechanics.hpp"

namespace stiffsim {

struct ContactParams {
  Vec3 stiffness = Vec3::Constant(1e5);  // N/m
  Vec3 damping = Vec3::Constant(300.0);  // N s/m
  double mu = 1.0;

  static ContactParams isotropic(double k, double b, double mu);
  // B = 2 xi sqrt(K), the damping ratio convention used by the benchmarks.
  static ContactParams from_damping_ratio(double k, double xi, double mu);
};

double damping_from_ratio(double k, double xi);
double damping_ratio(double k, double b);

struct ContactPointState {
  bool active = false;
  Vec3 anchor = Vec3::Zero();           // p0
  Vec3 anchor_velocity = Vec3::Zero();  // pdot0
  Vec3 stiffness = Vec3::Constant(1e5);
  Vec3 damping = Vec3::Constant(300.0);
  double mu = 1.0;
};

std::vector<ContactPointState> make_contacts(int count,
                                             const ContactParams& params);

// Activates penetrating inactive points (anchor at the ground projection,
// zero anchor velocity) and releases active points above the ground.
void detect_and_update(const ContactKinematics& kin,
                       std::vector<ContactPointState>& contacts);
void detect_and_update(const Model& model, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& v,
                       std::vector<ContactPointState>& contacts);

// -K (p - p0) - B (pdot - pdot0), componentwise.
Vec3 spring_damper_force(const ContactPointState& cp, const Vec3& p,
                         const Vec3& pdot);

struct FrictionConeCheck {
  bool inside = true;
  Vec3 projected = Vec3::Zero();
};

// Pulling normal forces map to zero; tangential parts outside the cone are
// shrunk onto its boundary keeping the normal component.
FrictionConeCheck project_friction_cone(const Vec3& force, double mu);

// Moves the tangential anchor so that the spring-damper force at (p, pdot)
// has tangential part equal to that of force_post, and makes the anchor
// slide with the point. The normal components of the anchor are unchanged.
ContactPointState anchor_slip_update(const ContactPointState& cp,
                                     const Vec3& p, const Vec3& pdot,
                                     const Vec3& force_post);

}  // namespace stiffsim
