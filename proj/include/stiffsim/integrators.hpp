#pragma once

// Time steppers for M vdot = u + J^T f with visco-elastic contacts: the
// exponential integrator on the contact-space dynamics, and explicit Euler,
// RK4 and implicit Euler on the full state.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stiffsim/contact.hpp"
#include "stiffsim/expm.hpp"
#include "stiffsim/mechanics.hpp"

namespace stiffsim {

enum class IntegratorKind { kExpo, kEulerExplicit, kRk4, kEulerImplicit };

// "expo", "euler-exp", "rk4", "euler-imp".
std::string to_string(IntegratorKind kind);
IntegratorKind parse_integrator(std::string_view name);

// Linear dynamics of the stacked contact deviations x = (p - p0, pdot - pdot0)
// of the k/3 active contacts, x' = A x + b, with forces f = D x. All terms
// are frozen at the state where the system was built.
struct ContactLds {
  std::vector<int> active;         // model contact indices, in stacking order
  Eigen::MatrixXd a;               // 2k x 2k, [0 I; -Y K, -Y B]
  Eigen::VectorXd b;               // 2k, (0, pddot_free)
  Eigen::VectorXd x0;              // 2k
  Eigen::MatrixXd d;               // k x 2k, [-K -B]
  Eigen::MatrixXd delassus;        // Y = J M^-1 J^T
  Eigen::VectorXd free_acc;        // M^-1 u
  Eigen::VectorXd free_contact_acc;  // J M^-1 u + Jdot v
  Eigen::MatrixXd minv_jt;         // M^-1 J^T, nv x k
  Eigen::MatrixXd lift;            // M^-1 J^T D, nv x 2k

  int size() const { return int(x0.size()); }
  // Contact forces D x(t) predicted by the frozen linear system.
  Eigen::VectorXd predicted_force(
      double t, const PadePolicy& policy = PadePolicy::full()) const;
};

// Throws SingularMassMatrixError if M is not positive definite and
// std::invalid_argument if no contact is active.
ContactLds build_contact_lds(const Model& model,
                             const std::vector<ContactPointState>& contacts,
                             const RobotState& x, const Eigen::VectorXd& tau);

struct StepReport {
  // Forces used for the velocity update, per model contact (zero when
  // inactive). For expo these are the projected step averages.
  std::vector<Vec3> force;
  // Expo only: projected average-of-average forces used for the position.
  std::vector<Vec3> force_position;
  // Expo only: unprojected step average and average-of-average forces.
  std::vector<Vec3> mean_force;
  std::vector<Vec3> mean_mean_force;
  std::vector<bool> slipping;
  int newton_iterations = 0;
  bool converged = true;
  double residual = 0.0;
  std::int64_t wall_ns = 0;
  std::int64_t kernel_ns = 0;
};

struct StepResult {
  RobotState state;
  StepReport report;
};

struct ImplicitOptions {
  double tolerance = 1e-6;  // on the velocity residual, infinity norm
  int max_iterations = 20;
};

// (v, M^-1 (u + J^T f)) with the cone-projected spring-damper forces of the
// active contacts. Length 2 nv (tangent-space rate).
Eigen::VectorXd continuous_dynamics(
    const Model& model, const std::vector<ContactPointState>& contacts,
    const RobotState& x, const Eigen::VectorXd& tau);

// Each stepper first runs contact detection on `contacts`, then advances the
// state by dt, and finally resets the anchors of slipping contacts. A
// non-finite result throws IntegrationDivergedError.
StepResult expo_step(const Model& model,
                     std::vector<ContactPointState>& contacts,
                     const RobotState& x, const Eigen::VectorXd& tau,
                     double dt, const PadePolicy& policy = PadePolicy::full());

StepResult euler_explicit_step(const Model& model,
                               std::vector<ContactPointState>& contacts,
                               const RobotState& x, const Eigen::VectorXd& tau,
                               double dt);

StepResult rk4_step(const Model& model,
                    std::vector<ContactPointState>& contacts,
                    const RobotState& x, const Eigen::VectorXd& tau,
                    double dt);

// Solves v+ = v + dt a(q (+) dt v+, v+) by damped Newton with a
// finite-difference Jacobian. Non-convergence is reported, not thrown.
StepResult euler_implicit_step(const Model& model,
                               std::vector<ContactPointState>& contacts,
                               const RobotState& x, const Eigen::VectorXd& tau,
                               double dt, const ImplicitOptions& options = {});

struct IntegratorSetup {
  IntegratorKind kind = IntegratorKind::kExpo;
  PadePolicy policy = PadePolicy::full();

  // "expo" / "expo-mmm2" / "rk4" ...
  std::string label() const;
  friend bool operator==(const IntegratorSetup&,
                         const IntegratorSetup&) = default;
};

StepResult step(const IntegratorSetup& setup, const Model& model,
                std::vector<ContactPointState>& contacts, const RobotState& x,
                const Eigen::VectorXd& tau, double dt);

}  // namespace stiffsim
