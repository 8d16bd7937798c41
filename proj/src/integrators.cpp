#include "stiffsim/integrators.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "stiffsim/errors.hpp"

namespace stiffsim {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                              since)
      .count();
}

Eigen::LLT<MatrixXd> factor_mass(const Model& model, const VectorXd& q) {
  Eigen::LLT<MatrixXd> llt(model.mass_matrix(q));
  if (llt.info() != Eigen::Success) {
    throw SingularMassMatrixError("mass matrix of " + model.info().name +
                                  " is not positive definite");
  }
  return llt;
}

struct ContactForces {
  std::vector<Vec3> force;
  std::vector<bool> projected;
  bool any_active = false;
};

ContactForces evaluate_forces(const ContactKinematics& kin,
                              const std::vector<ContactPointState>& contacts) {
  ContactForces out;
  out.force.assign(contacts.size(), Vec3::Zero());
  out.projected.assign(contacts.size(), false);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const ContactPointState& cp = contacts[i];
    if (!cp.active) continue;
    out.any_active = true;
    const auto cone = project_friction_cone(
        spring_damper_force(cp, kin[i].p, kin[i].pdot), cp.mu);
    out.force[i] = cone.projected;
    out.projected[i] = !cone.inside;
  }
  return out;
}

// M^-1 (u + J^T f). Without active contacts this is exactly M^-1 u, the same
// expression the exponential stepper uses for its free acceleration.
VectorXd acceleration(const Eigen::LLT<MatrixXd>& llt, const VectorXd& u,
                      const ContactKinematics& kin,
                      const ContactForces& forces) {
  if (!forces.any_active) return llt.solve(u);
  VectorXd rhs = u;
  for (std::size_t i = 0; i < kin.size(); ++i) {
    rhs.noalias() += kin[i].jacobian.transpose() * forces.force[i];
  }
  return llt.solve(rhs);
}

struct Evaluation {
  VectorXd acc;
  ContactForces forces;
};

Evaluation evaluate(const Model& model,
                    const std::vector<ContactPointState>& contacts,
                    const VectorXd& q, const VectorXd& v, const VectorXd& tau) {
  const ContactKinematics kin = model.contact_kinematics(q, v);
  const auto llt = factor_mass(model, q);
  Evaluation e;
  e.forces = evaluate_forces(kin, contacts);
  e.acc = acceleration(llt, model.nonlinear_and_actuation(q, v, tau), kin,
                       e.forces);
  return e;
}

RobotState ballistic_update(const Model& model, const RobotState& x,
                            const VectorXd& acc, double dt) {
  RobotState next;
  next.v = x.v + dt * acc;
  next.q = model.integrate_configuration(x.q, dt * x.v + (0.5 * dt * dt) * acc);
  return next;
}

void check_finite(const RobotState& x, const char* who) {
  if (!x.q.allFinite() || !x.v.allFinite()) {
    throw IntegrationDivergedError(std::string(who) +
                                   ": state became non-finite");
  }
}

void reset_slipping_anchors(const Model& model,
                            std::vector<ContactPointState>& contacts,
                            const std::vector<bool>& slipping,
                            const RobotState& next) {
  bool any = false;
  for (std::size_t i = 0; i < slipping.size(); ++i) {
    any = any || (slipping[i] && contacts[i].active);
  }
  if (!any) return;
  const ContactKinematics kin = model.contact_kinematics(next.q, next.v);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    ContactPointState& cp = contacts[i];
    if (!slipping[i] || !cp.active) continue;
    const Vec3 post = project_friction_cone(
                          spring_damper_force(cp, kin[i].p, kin[i].pdot), cp.mu)
                          .projected;
    cp = anchor_slip_update(cp, kin[i].p, kin[i].pdot, post);
  }
}

void init_report(StepReport& r, std::size_t nc) {
  r.force.assign(nc, Vec3::Zero());
  r.slipping.assign(nc, false);
}

ContactLds assemble_lds(const ContactKinematics& kin,
                        const std::vector<ContactPointState>& contacts,
                        const Eigen::LLT<MatrixXd>& llt, const VectorXd& u,
                        const VectorXd& v) {
  ContactLds lds;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    if (contacts[i].active) lds.active.push_back(int(i));
  }
  if (lds.active.empty()) {
    throw std::invalid_argument("contact LDS needs at least one active contact");
  }
  const int nv = int(v.size());
  const int k = 3 * int(lds.active.size());

  MatrixXd jac(k, nv);
  VectorXd drift(k), dp(k), dpdot(k), stiff(k), damp(k);
  for (std::size_t j = 0; j < lds.active.size(); ++j) {
    const int i = lds.active[j];
    const ContactPointState& cp = contacts[i];
    jac.middleRows(3 * j, 3) = kin[i].jacobian;
    drift.segment<3>(3 * j) = kin[i].drift;
    dp.segment<3>(3 * j) = kin[i].p - cp.anchor;
    dpdot.segment<3>(3 * j) = kin[i].pdot - cp.anchor_velocity;
    stiff.segment<3>(3 * j) = cp.stiffness;
    damp.segment<3>(3 * j) = cp.damping;
  }

  // Y = J M^-1 J^T = W^T W with W = L^-1 J^T, symmetric by construction.
  const MatrixXd w = llt.matrixL().solve(jac.transpose());
  lds.delassus = w.transpose() * w;
  lds.minv_jt = llt.solve(jac.transpose());
  lds.free_acc = llt.solve(u);
  lds.free_contact_acc = jac * lds.free_acc + drift;

  lds.x0.resize(2 * k);
  lds.x0 << dp, dpdot;
  lds.a = MatrixXd::Zero(2 * k, 2 * k);
  lds.a.topRightCorner(k, k).setIdentity();
  lds.a.bottomLeftCorner(k, k) = -(lds.delassus * stiff.asDiagonal());
  lds.a.bottomRightCorner(k, k) = -(lds.delassus * damp.asDiagonal());
  lds.b = VectorXd::Zero(2 * k);
  lds.b.tail(k) = lds.free_contact_acc;
  lds.d.resize(k, 2 * k);
  lds.d << MatrixXd((-stiff).asDiagonal()), MatrixXd((-damp).asDiagonal());
  lds.lift = lds.minv_jt * lds.d;
  return lds;
}

}  // namespace

std::string to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::kExpo:
      return "expo";
    case IntegratorKind::kEulerExplicit:
      return "euler-exp";
    case IntegratorKind::kRk4:
      return "rk4";
    case IntegratorKind::kEulerImplicit:
      return "euler-imp";
  }
  return "?";
}

IntegratorKind parse_integrator(std::string_view name) {
  for (auto k : {IntegratorKind::kExpo, IntegratorKind::kEulerExplicit,
                 IntegratorKind::kRk4, IntegratorKind::kEulerImplicit}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown integrator '" + std::string(name) +
                              "' (expected expo, euler-exp, rk4, euler-imp)");
}

std::string IntegratorSetup::label() const {
  if (kind == IntegratorKind::kExpo && !policy.is_full()) {
    return "expo-mmm" + policy.name();
  }
  return to_string(kind);
}

VectorXd ContactLds::predicted_force(double t, const PadePolicy& policy) const {
  const int n = size();
  MatrixXd aug = MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = a;
  aug.topRightCorner(n, 1) = b;
  VectorXd start(n + 1);
  start << x0, 1.0;
  const MatrixXd x = expm_multiply(t * aug, start, policy);
  return d * x.col(0).head(n);
}

ContactLds build_contact_lds(const Model& model,
                             const std::vector<ContactPointState>& contacts,
                             const RobotState& x, const VectorXd& tau) {
  const ContactKinematics kin = model.contact_kinematics(x.q, x.v);
  const auto llt = factor_mass(model, x.q);
  return assemble_lds(kin, contacts, llt,
                      model.nonlinear_and_actuation(x.q, x.v, tau), x.v);
}

VectorXd continuous_dynamics(const Model& model,
                             const std::vector<ContactPointState>& contacts,
                             const RobotState& x, const VectorXd& tau) {
  const Evaluation e = evaluate(model, contacts, x.q, x.v, tau);
  VectorXd out(2 * x.v.size());
  out << x.v, e.acc;
  return out;
}

StepResult expo_step(const Model& model,
                     std::vector<ContactPointState>& contacts,
                     const RobotState& x, const VectorXd& tau, double dt,
                     const PadePolicy& policy) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto start = Clock::now();
  StepResult res;
  StepReport& rep = res.report;
  const std::size_t nc = contacts.size();
  init_report(rep, nc);
  rep.force_position.assign(nc, Vec3::Zero());
  rep.mean_force.assign(nc, Vec3::Zero());
  rep.mean_mean_force.assign(nc, Vec3::Zero());

  const ContactKinematics kin = model.contact_kinematics(x.q, x.v);
  detect_and_update(kin, contacts);
  const auto llt = factor_mass(model, x.q);
  const VectorXd u = model.nonlinear_and_actuation(x.q, x.v, tau);

  bool any_active = false;
  for (const auto& cp : contacts) any_active = any_active || cp.active;

  if (!any_active) {
    const VectorXd acc = llt.solve(u);
    res.state = ballistic_update(model, x, acc, dt);
  } else {
    const ContactLds lds = assemble_lds(kin, contacts, llt, u, x.v);
    const auto kernel_start = Clock::now();
    const ExpIntegrals ints =
        compute_integrals(lds.a, lds.b, lds.x0, dt, policy);
    rep.kernel_ns = elapsed_ns(kernel_start);

    const VectorXd mean = lds.d * ints.x_int / dt;
    const VectorXd mean_mean = (2.0 / (dt * dt)) * (lds.d * ints.x_int2);
    VectorXd proj(mean.size());
    VectorXd proj2(mean.size());
    for (std::size_t j = 0; j < lds.active.size(); ++j) {
      const int i = lds.active[j];
      const double mu = contacts[i].mu;
      const Vec3 f1 = mean.segment<3>(3 * j);
      const Vec3 f2 = mean_mean.segment<3>(3 * j);
      const auto c1 = project_friction_cone(f1, mu);
      const auto c2 = project_friction_cone(f2, mu);
      proj.segment<3>(3 * j) = c1.projected;
      proj2.segment<3>(3 * j) = c2.projected;
      rep.mean_force[i] = f1;
      rep.mean_mean_force[i] = f2;
      rep.force[i] = c1.projected;
      rep.force_position[i] = c2.projected;
      rep.slipping[i] = !c1.inside;
    }

    const VectorXd acc = lds.free_acc + lds.minv_jt * proj;
    const VectorXd acc_pos = lds.free_acc + lds.minv_jt * proj2;
    res.state.v = x.v + dt * acc;
    const VectorXd v_mean = x.v + (0.5 * dt) * acc_pos;
    res.state.q = model.integrate_configuration(x.q, dt * v_mean);
  }

  check_finite(res.state, "expo");
  reset_slipping_anchors(model, contacts, rep.slipping, res.state);
  rep.wall_ns = elapsed_ns(start);
  return res;
}

StepResult euler_explicit_step(const Model& model,
                               std::vector<ContactPointState>& contacts,
                               const RobotState& x, const VectorXd& tau,
                               double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto start = Clock::now();
  StepResult res;
  init_report(res.report, contacts.size());

  const ContactKinematics kin = model.contact_kinematics(x.q, x.v);
  detect_and_update(kin, contacts);
  const auto llt = factor_mass(model, x.q);
  const VectorXd u = model.nonlinear_and_actuation(x.q, x.v, tau);
  const ContactForces forces = evaluate_forces(kin, contacts);
  const VectorXd acc = acceleration(llt, u, kin, forces);
  res.state = ballistic_update(model, x, acc, dt);
  res.report.force = forces.force;
  res.report.slipping = forces.projected;

  check_finite(res.state, "euler-exp");
  reset_slipping_anchors(model, contacts, res.report.slipping, res.state);
  res.report.wall_ns = elapsed_ns(start);
  return res;
}

StepResult rk4_step(const Model& model,
                    std::vector<ContactPointState>& contacts,
                    const RobotState& x, const VectorXd& tau, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto start = Clock::now();
  StepResult res;
  init_report(res.report, contacts.size());
  detect_and_update(model, x.q, x.v, contacts);

  auto stage = [&](const VectorXd& q, const VectorXd& v) {
    return evaluate(model, contacts, q, v, tau);
  };
  const Evaluation e1 = stage(x.q, x.v);
  const VectorXd& a1 = e1.acc;
  const VectorXd& d1 = x.v;

  const VectorXd v2 = x.v + 0.5 * dt * a1;
  const VectorXd q2 = model.integrate_configuration(x.q, 0.5 * dt * d1);
  const VectorXd a2 = stage(q2, v2).acc;

  const VectorXd v3 = x.v + 0.5 * dt * a2;
  const VectorXd q3 = model.integrate_configuration(x.q, 0.5 * dt * v2);
  const VectorXd a3 = stage(q3, v3).acc;

  const VectorXd v4 = x.v + dt * a3;
  const VectorXd q4 = model.integrate_configuration(x.q, dt * v3);
  const VectorXd a4 = stage(q4, v4).acc;

  res.state.v = x.v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  res.state.q = model.integrate_configuration(
      x.q, (dt / 6.0) * (d1 + 2.0 * v2 + 2.0 * v3 + v4));
  res.report.force = e1.forces.force;
  res.report.slipping = e1.forces.projected;

  check_finite(res.state, "rk4");
  reset_slipping_anchors(model, contacts, res.report.slipping, res.state);
  res.report.wall_ns = elapsed_ns(start);
  return res;
}

StepResult euler_implicit_step(const Model& model,
                               std::vector<ContactPointState>& contacts,
                               const RobotState& x, const VectorXd& tau,
                               double dt, const ImplicitOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto start = Clock::now();
  StepResult res;
  init_report(res.report, contacts.size());
  detect_and_update(model, x.q, x.v, contacts);
  const int nv = int(x.v.size());

  auto residual = [&](const VectorXd& w) {
    const VectorXd q1 = model.integrate_configuration(x.q, dt * w);
    return VectorXd(w - x.v - dt * evaluate(model, contacts, q1, w, tau).acc);
  };
  auto inf_norm = [](const VectorXd& r) { return r.cwiseAbs().maxCoeff(); };

  VectorXd w = x.v;
  VectorXd r = residual(w);
  double r_norm = inf_norm(r);
  VectorXd best = w;
  double best_norm = r_norm;
  int iterations = 0;

  MatrixXd jac(nv, nv);
  while (std::isfinite(r_norm) && r_norm > options.tolerance &&
         iterations < options.max_iterations) {
    for (int j = 0; j < nv; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(w(j)));
      VectorXd wp = w;
      wp(j) += h;
      jac.col(j) = (residual(wp) - r) / h;
    }
    const VectorXd delta = jac.partialPivLu().solve(-r);
    double alpha = 1.0;
    VectorXd w_try = w + delta;
    VectorXd r_try = residual(w_try);
    while (!(inf_norm(r_try) < r_norm) && alpha > 1.0 / 1024.0) {
      alpha *= 0.5;
      w_try = w + alpha * delta;
      r_try = residual(w_try);
    }
    w = w_try;
    r = r_try;
    r_norm = inf_norm(r);
    ++iterations;
    if (r_norm < best_norm) {
      best = w;
      best_norm = r_norm;
    }
  }

  res.state.v = best;
  res.state.q = model.integrate_configuration(x.q, dt * best);
  res.report.newton_iterations = iterations;
  res.report.residual = best_norm;
  res.report.converged = best_norm <= options.tolerance;

  check_finite(res.state, "euler-imp");
  const ContactForces final_forces = evaluate_forces(
      model.contact_kinematics(res.state.q, res.state.v), contacts);
  res.report.force = final_forces.force;
  res.report.slipping = final_forces.projected;
  reset_slipping_anchors(model, contacts, res.report.slipping, res.state);
  res.report.wall_ns = elapsed_ns(start);
  return res;
}

StepResult step(const IntegratorSetup& setup, const Model& model,
                std::vector<ContactPointState>& contacts, const RobotState& x,
                const VectorXd& tau, double dt) {
  switch (setup.kind) {
    case IntegratorKind::kExpo:
      return expo_step(model, contacts, x, tau, dt, setup.policy);
    case IntegratorKind::kEulerExplicit:
      return euler_explicit_step(model, contacts, x, tau, dt);
    case IntegratorKind::kRk4:
      return rk4_step(model, contacts, x, tau, dt);
    case IntegratorKind::kEulerImplicit:
      return euler_implicit_step(model, contacts, x, tau, dt);
  }
  throw std::logic_error("unhandled integrator kind");
}

}  // namespace stiffsim
