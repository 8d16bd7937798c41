#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "stiffsim/errors.hpp"
#include "stiffsim/expm.hpp"
#include "stiffsim/integrators.hpp"
#include "stiffsim/scenarios.hpp"

namespace stiffsim {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const IntegratorKind kAllKinds[] = {
    IntegratorKind::kExpo, IntegratorKind::kEulerExplicit,
    IntegratorKind::kRk4, IntegratorKind::kEulerImplicit};

StepResult take(IntegratorKind kind, const Model& m,
                std::vector<ContactPointState>& c, const RobotState& x,
                double dt, const VectorXd& tau) {
  return step({kind, PadePolicy::full()}, m, c, x, tau, dt);
}

std::vector<ContactPointState> default_contacts(const Model& m) {
  return make_contacts(m.info().nc, ContactParams{});
}

// Point mass sitting at its static penetration with an active contact.
RobotState resting_mass(double mass, double k) {
  return {Vec3(0, 0, -mass * kGravity / k), Vec3::Zero()};
}

// One contact whose x axis is a pure damper c = b/m on the point mass; the
// normal axis sits at equilibrium, so v_x obeys vdot = -c v.
struct DamperAxis {
  PointMass3D model{1.0};
  std::vector<ContactPointState> contacts;
  RobotState x;

  explicit DamperAxis(double b) {
    contacts = make_contacts(1, ContactParams{});
    contacts[0].stiffness = Vec3(1e-12, 1e-12, 1e5);
    contacts[0].damping = Vec3(b, b, 0.0);
    contacts[0].mu = 1e9;
    x = resting_mass(1.0, 1e5);
    x.v(0) = 1.0;
  }
};

TEST(IntegratorNames, RoundTrip) {
  for (IntegratorKind k : kAllKinds) EXPECT_EQ(parse_integrator(to_string(k)), k);
  EXPECT_EQ(to_string(IntegratorKind::kEulerExplicit), "euler-exp");
  EXPECT_EQ(to_string(IntegratorKind::kEulerImplicit), "euler-imp");
  EXPECT_THROW(parse_integrator("verlet"), std::invalid_argument);
  EXPECT_EQ((IntegratorSetup{IntegratorKind::kExpo, PadePolicy::reduced(2)}.label()),
            "expo-mmm2");
  EXPECT_EQ((IntegratorSetup{IntegratorKind::kRk4, PadePolicy::full()}.label()),
            "rk4");
}

TEST(ContinuousDynamics, FreeFlight) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const RobotState x{Vec3(0, 0, 1), Vec3(1, 2, 3)};
  VectorXd expected(6);
  expected << 1, 2, 3, 0, 0, -kGravity;
  EXPECT_TRUE(continuous_dynamics(m, c, x, m.zero_input()).isApprox(expected));
}

TEST(ContinuousDynamics, PenetratingMassAtRest) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const RobotState x{Vec3(0, 0, -0.001), Vec3::Zero()};
  detect_and_update(m, x.q, x.v, c);
  const VectorXd d = continuous_dynamics(m, c, x, m.zero_input());
  EXPECT_NEAR(d(5), 100.0 - kGravity, 1e-10);
  EXPECT_NEAR(d(5), 90.19, 1e-10);
}

TEST(ContinuousDynamics, AccelerationRecomposesFromParts) {
  auto box = benchmark_box();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    RobotState x{FreeBox3D::configuration(Vec3(0, 0, 0.045), 0.05 * u(rng),
                                          0.05 * u(rng), u(rng)),
                 VectorXd::Zero(6)};
    for (int j = 0; j < 6; ++j) x.v(j) = 0.1 * u(rng);
    auto c = make_contacts(4, ContactParams{});
    detect_and_update(*box, x.q, x.v, c);
    VectorXd tau(6);
    for (int j = 0; j < 6; ++j) tau(j) = u(rng);
    const VectorXd acc = continuous_dynamics(*box, c, x, tau).tail(6);

    const auto kin = box->contact_kinematics(x.q, x.v);
    VectorXd gen = box->nonlinear_and_actuation(x.q, x.v, tau);
    for (std::size_t k = 0; k < kin.size(); ++k) {
      if (!c[k].active) continue;
      const Vec3 f = project_friction_cone(
          spring_damper_force(c[k], kin[k].p, kin[k].pdot), c[k].mu).projected;
      gen += kin[k].jacobian.transpose() * f;
    }
    const VectorXd expected = box->mass_matrix(x.q).ldlt().solve(gen);
    EXPECT_LE((acc - expected).cwiseAbs().maxCoeff(),
              1e-12 * (1 + expected.cwiseAbs().maxCoeff()));
  }
}

TEST(ContactLds, PointMassDelassus) {
  const PointMass3D m(2.0);
  auto c = default_contacts(m);
  const RobotState x{Vec3(0, 0, -0.001), Vec3(0.1, 0, -0.2)};
  detect_and_update(m, x.q, x.v, c);
  const ContactLds lds = build_contact_lds(m, c, x, m.zero_input());
  EXPECT_TRUE(lds.delassus.isApprox(0.5 * MatrixXd::Identity(3, 3)));
  EXPECT_EQ(lds.size(), 6);
  EXPECT_TRUE(lds.x0.isApprox((VectorXd(6) << 0, 0, -0.001, 0.1, 0, -0.2).finished()));
  EXPECT_TRUE(lds.b.tail(3).isApprox(Vec3(0, 0, -kGravity)));
}

TEST(ContactLds, RequiresActiveContact) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const RobotState x{Vec3(0, 0, 1), Vec3::Zero()};
  EXPECT_THROW(build_contact_lds(m, c, x, m.zero_input()), std::invalid_argument);
}

// Box tilted so that all four corners penetrate.
RobotState pressed_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  RobotState x{FreeBox3D::configuration(Vec3(0.01 * u(rng), 0.01 * u(rng), 0.0495),
                                        0.002 * u(rng), 0.002 * u(rng), u(rng)),
               VectorXd::Zero(6)};
  for (int j = 0; j < 6; ++j) x.v(j) = 0.005 * u(rng);
  return x;
}

// Box near static equilibrium on all four corners, slightly perturbed.
RobotState settled_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double sink = 0.5 * kGravity / 4e5;
  RobotState x{FreeBox3D::configuration(Vec3(0, 0, 0.05 - sink - 5e-6 * u(rng)),
                                        5e-5 * u(rng), 5e-5 * u(rng), u(rng)),
               VectorXd::Zero(6)};
  for (int j = 0; j < 6; ++j) x.v(j) = 1e-4 * u(rng);
  return x;
}

bool inside_cone(const Model& m, const std::vector<ContactPointState>& c,
                 const RobotState& x) {
  const auto kin = m.contact_kinematics(x.q, x.v);
  for (std::size_t k = 0; k < kin.size(); ++k) {
    if (c[k].active &&
        !project_friction_cone(spring_damper_force(c[k], kin[k].p, kin[k].pdot), c[k].mu)
             .inside) {
      return false;
    }
  }
  return true;
}

TEST(ContactLds, BoxStructure) {
  auto box = benchmark_box();
  std::mt19937_64 rng(32);
  const RobotState x = pressed_box(rng);
  auto c = make_contacts(4, ContactParams{});
  detect_and_update(*box, x.q, x.v, c);
  for (const auto& cp : c) ASSERT_TRUE(cp.active);
  const ContactLds lds = build_contact_lds(*box, c, x, box->zero_input());
  ASSERT_EQ(lds.a.rows(), 24);
  EXPECT_EQ(lds.a.topLeftCorner(12, 12), MatrixXd::Zero(12, 12));
  EXPECT_EQ(lds.a.topRightCorner(12, 12), MatrixXd::Identity(12, 12));
  const MatrixXd& y = lds.delassus;
  EXPECT_LE((y - y.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(y).eigenvalues().minCoeff(), -1e-12);
  const MatrixXd k = MatrixXd::Identity(12, 12) * 1e5;
  const MatrixXd b = MatrixXd::Identity(12, 12) * 300.0;
  EXPECT_TRUE(lds.a.bottomLeftCorner(12, 12).isApprox(-y * k));
  EXPECT_TRUE(lds.a.bottomRightCorner(12, 12).isApprox(-y * b));
  const Eigen::VectorXcd ev = MatrixXd(lds.a.bottomLeftCorner(12, 12)).eigenvalues();
  EXPECT_LE(ev.real().maxCoeff(), 1e-6);
}

TEST(ContactLds, RateMatchesFiniteDifferenceOfTrueFlow) {
  auto box = benchmark_box();
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const RobotState x = pressed_box(rng);
    auto c = make_contacts(4, ContactParams{});
    detect_and_update(*box, x.q, x.v, c);
    ASSERT_TRUE(inside_cone(*box, c, x));
    const ContactLds lds = build_contact_lds(*box, c, x, box->zero_input());
    const VectorXd rate = lds.a * lds.x0 + lds.b;

    // Richardson combination of forward differences at h and 2h.
    const double h = 1e-7;
    auto difference = [&](double step_size) {
      auto c1 = c;
      const RobotState x1 = rk4_step(*box, c1, x, box->zero_input(), step_size).state;
      const auto k0 = box->contact_kinematics(x.q, x.v);
      const auto k1 = box->contact_kinematics(x1.q, x1.v);
      VectorXd d(24);
      for (int i = 0; i < 4; ++i) {
        d.segment<3>(3 * i) = (k1[i].p - k0[i].p) / step_size;
        d.segment<3>(12 + 3 * i) = (k1[i].pdot - k0[i].pdot) / step_size;
      }
      return d;
    };
    const VectorXd fd = (4.0 * difference(h) - difference(2 * h)) / 3.0;

    const VectorXd acc = continuous_dynamics(*box, c, x, box->zero_input()).tail(6);
    const auto kin = box->contact_kinematics(x.q, x.v);
    for (int i = 0; i < 4; ++i) {
      const Vec3 pddot = kin[i].jacobian * acc + kin[i].drift;
      EXPECT_LE((pddot - rate.segment<3>(12 + 3 * i)).cwiseAbs().maxCoeff(),
                1e-9 * (1 + pddot.norm()));
    }
    EXPECT_LE((fd.head(12) - rate.head(12)).cwiseAbs().maxCoeff(),
              1e-3 * (1 + rate.head(12).cwiseAbs().maxCoeff()));
    EXPECT_LE((fd.tail(12) - rate.tail(12)).cwiseAbs().maxCoeff(),
              1e-3 * rate.tail(12).cwiseAbs().maxCoeff());
  }
}

TEST(ExpoStep, BallisticClosedForm) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const auto r = expo_step(m, c, {Vec3(0, 0, 1), Vec3::Zero()}, m.zero_input(), 0.01);
  EXPECT_NEAR(r.state.v(2), -0.0981, 1e-15);
  EXPECT_NEAR(r.state.q(2), 0.99950950, 1e-15);
  EXPECT_EQ(r.state.q.head<2>(), Eigen::Vector2d::Zero());
}

TEST(ExpoStep, RestingMassIsFixedPoint) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  RobotState x = resting_mass(1.0, 1e5);
  const RobotState x0 = x;
  for (int i = 0; i < 10; ++i) x = expo_step(m, c, x, m.zero_input(), 0.01).state;
  EXPECT_LE((x.q - x0.q).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(x.v.cwiseAbs().maxCoeff(), 1e-9);
}

// z(t) of m z'' = -K z - B z' - m g with the anchor at z = 0.
double oscillator(double k, double b, double m, double z0, double v0, double t) {
  const double w = std::sqrt(k / m);
  const double zeta = b / (2 * std::sqrt(k * m));
  const double wd = w * std::sqrt(1 - zeta * zeta);
  const double zs = -m * kGravity / k;
  const double y0 = z0 - zs;
  return zs + std::exp(-zeta * w * t) *
                  (y0 * std::cos(wd * t) + (v0 + zeta * w * y0) / wd * std::sin(wd * t));
}

TEST(ExpoStep, MatchesDampedOscillatorOnPointMass) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  RobotState x{Vec3(0.01, 0, -0.0002), Vec3(0, 0, -0.05)};
  detect_and_update(m, x.q, x.v, c);
  for (int i = 0; i < 20; ++i) {
    const double expected = oscillator(1e5, 300, 1.0, x.q(2), x.v(2), 0.01);
    const auto r = expo_step(m, c, x, m.zero_input(), 0.01);
    ASSERT_TRUE(c[0].active);
    ASSERT_FALSE(r.report.slipping[0]);
    EXPECT_LE(std::abs(r.state.q(2) - expected), 1e-8) << "step " << i;
    EXPECT_EQ(r.state.q(0), 0.01);
    x = r.state;
  }
}

TEST(ExpoStep, ReproducesUnprojectedUpdatesWhenSticking) {
  auto box = benchmark_box();
  std::mt19937_64 rng(34);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const RobotState x = pressed_box(rng);
    auto c = make_contacts(4, ContactParams{});
    detect_and_update(*box, x.q, x.v, c);
    const ContactLds lds = build_contact_lds(*box, c, x, box->zero_input());
    const double dt = 0.01;
    const ExpIntegrals in = compute_integrals(lds.a, lds.b, lds.x0, dt);
    auto c1 = c;
    const auto r = expo_step(*box, c1, x, box->zero_input(), dt);
    bool projected = false;
    for (int k = 0; k < 4; ++k) {
      projected = projected || r.report.mean_force[k] != r.report.force[k] ||
                  r.report.mean_mean_force[k] != r.report.force_position[k];
    }
    if (projected) continue;
    ++checked;
    const VectorXd v_plus = x.v + dt * lds.free_acc + lds.lift * in.x_int;
    const VectorXd dq = dt * x.v + 0.5 * dt * dt * lds.free_acc + lds.lift * in.x_int2;
    const VectorXd q_plus = box->integrate_configuration(x.q, dq);
    EXPECT_LE((r.state.v - v_plus).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.state.q - q_plus).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_GE(checked, 10);
}

TEST(ExpoStep, ForcePredictionExactForPointMass) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const RobotState x0{Vec3(0, 0, -kGravity / 1e5 - 5e-5), Vec3::Zero()};
  detect_and_update(m, x0.q, x0.v, c);
  const ContactLds lds = build_contact_lds(m, c, x0, m.zero_input());
  RobotState x = x0;
  const double h = 1e-5;
  for (int i = 1; i <= 2000; ++i) {
    x = rk4_step(m, c, x, m.zero_input(), h).state;
    if (i % 200) continue;
    ASSERT_TRUE(c[0].active);
    const auto kin = m.contact_kinematics(x.q, x.v);
    const Vec3 sim = spring_damper_force(c[0], kin[0].p, kin[0].pdot);
    EXPECT_LE((lds.predicted_force(i * h) - sim).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ExpoStep, ForcePredictionTracksBoxOverTwentyMs) {
  auto box = benchmark_box();
  std::mt19937_64 rng(35);
  const RobotState x0 = settled_box(rng);
  auto c = make_contacts(4, ContactParams{});
  detect_and_update(*box, x0.q, x0.v, c);
  const ContactLds lds = build_contact_lds(*box, c, x0, box->zero_input());
  RobotState x = x0;
  const double h = 1e-5;
  double err = 0.0, scale = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    x = rk4_step(*box, c, x, box->zero_input(), h).state;
    if (i % 100) continue;
    const auto kin = box->contact_kinematics(x.q, x.v);
    VectorXd sim = VectorXd::Zero(12);
    for (int k = 0; k < 4; ++k) {
      if (c[k].active) {
        sim.segment<3>(3 * k) = project_friction_cone(
            spring_damper_force(c[k], kin[k].p, kin[k].pdot), c[k].mu).projected;
      }
    }
    err = std::max(err, (lds.predicted_force(i * h) - sim).norm());
    scale = std::max(scale, sim.norm());
  }
  EXPECT_LE(err, 0.2 * scale);
}

TEST(ExpoStep, SlipResetsAnchorToPointVelocity) {
  auto box = benchmark_box();
  ContactParams p = ContactParams::isotropic(1e5, 300, 0.2);
  auto c = make_contacts(4, p);
  RobotState x{FreeBox3D::configuration(Vec3(0, 0, 0.05 - 0.5 * kGravity / 4e5), 0, 0, 0),
               VectorXd::Zero(6)};
  x.v(0) = 0.5;
  int slips = 0;
  for (int i = 0; i < 20; ++i) {
    const auto r = expo_step(*box, c, x, box->zero_input(), 0.002);
    x = r.state;
    const auto kin = box->contact_kinematics(x.q, x.v);
    for (int k = 0; k < 4; ++k) {
      if (!r.report.slipping[k]) continue;
      ++slips;
      EXPECT_EQ(c[k].anchor_velocity.x(), kin[k].pdot.x());
      EXPECT_EQ(c[k].anchor_velocity.y(), kin[k].pdot.y());
    }
  }
  EXPECT_GT(slips, 0);
}

TEST(ExpoStep, NoContactEqualsExplicitEulerBitwise) {
  const std::vector<std::shared_ptr<const Model>> models = {
      std::make_shared<PointMass3D>(1.0), benchmark_box(),
      std::make_shared<PlanarHopper>()};
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& m : models) {
    const int nv = m->info().nv;
    RobotState x{VectorXd::Zero(m->info().nq), VectorXd::Zero(nv)};
    if (m->info().quaternion_q >= 0) {
      x.q = FreeBox3D::configuration(Vec3::Zero(), 0.3, 0.2, 0.1);
    }
    x.q(m->info().name == "planar-hopper" ? 1 : 2) = 50.0;
    for (int j = 0; j < nv; ++j) x.v(j) = u(rng);
    VectorXd tau = m->zero_input();
    for (int j = 0; j < nv; ++j) {
      if (m->info().actuated[j]) tau(j) = u(rng);
    }
    RobotState a = x, b = x;
    auto ca = default_contacts(*m), cb = ca;
    for (int i = 0; i < 100; ++i) {
      a = expo_step(*m, ca, a, tau, 0.01).state;
      b = euler_explicit_step(*m, cb, b, tau, 0.01).state;
      ASSERT_TRUE(a.q == b.q && a.v == b.v) << m->info().name << " step " << i;
    }
  }
}

TEST(Steppers, Deterministic) {
  const Scenario s = make_scenario("box-drop");
  for (IntegratorKind k : kAllKinds) {
    auto run = [&] {
      RobotState x = s.initial;
      auto c = s.initial_contacts();
      for (int i = 0; i < 60; ++i) x = take(k, *s.model, c, x, 0.002, s.model->zero_input()).state;
      return x;
    };
    const RobotState a = run(), b = run();
    EXPECT_TRUE(a.q == b.q && a.v == b.v) << to_string(k);
  }
}

TEST(EulerExplicit, LinearDamperStep) {
  DamperAxis d(20.0);
  const double dt = 0.01;
  const auto r = euler_explicit_step(d.model, d.contacts, d.x, d.model.zero_input(), dt);
  EXPECT_NEAR(r.state.v(0), 1.0 - 20.0 * dt, 1e-12);
}

TEST(EulerExplicit, BallisticPositionUsesHalfAcceleration) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  const auto r = euler_explicit_step(m, c, {Vec3(0, 0, 1), Vec3(1, 0, 0)}, m.zero_input(), 0.01);
  EXPECT_NEAR(r.state.v(2), -0.0981, 1e-15);
  EXPECT_NEAR(r.state.q(2), 1.0 - 0.5 * kGravity * 1e-4, 1e-15);
  EXPECT_NEAR(r.state.q(0), 0.01, 1e-15);
}

TEST(EulerExplicit, StiffImpactInjectsEnergy) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  RobotState x{Vec3(0, 0, 0.05), Vec3::Zero()};
  double impact_speed = 0.0, rebound_speed = 0.0;
  for (int i = 0; i < 30 && rebound_speed == 0.0; ++i) {
    const bool was_active = c[0].active;
    const RobotState before = x;
    x = euler_explicit_step(m, c, x, m.zero_input(), 0.01).state;
    if (c[0].active && !was_active) impact_speed = -before.v(2);
    if (impact_speed > 0 && x.v(2) > 0) rebound_speed = x.v(2);
  }
  ASSERT_GT(impact_speed, 0.0);
  EXPECT_GT(rebound_speed, 5.0 * impact_speed);
}

TEST(Rk4, BallisticIsExact) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  RobotState x{Vec3(0, 0, 1), Vec3(0.5, -0.2, 3.0)};
  const double dt = 0.01;
  for (int i = 0; i < 10; ++i) x = rk4_step(m, c, x, m.zero_input(), dt).state;
  const double t = 0.1;
  EXPECT_NEAR(x.q(0), 0.05, 1e-14);
  EXPECT_NEAR(x.q(1), -0.02, 1e-14);
  EXPECT_NEAR(x.q(2), 1.0 + 3.0 * t - 0.5 * kGravity * t * t, 1e-14);
  EXPECT_NEAR(x.v(2), 3.0 - kGravity * t, 1e-14);
}

TEST(Rk4, LinearDamperMatchesFourthOrderTaylor) {
  DamperAxis d(1.0);
  const auto r = rk4_step(d.model, d.contacts, d.x, d.model.zero_input(), 0.1);
  const double a = -0.1;
  EXPECT_NEAR(r.state.v(0), 1 + a + a * a / 2 + a * a * a / 6 + a * a * a * a / 24, 1e-12);
  EXPECT_NEAR(r.state.v(0), 0.9048375, 1e-7);
}

TEST(EulerImplicit, LinearDamperConvergesInOneIteration) {
  DamperAxis d(20.0);
  const double dt = 0.01;
  const auto r = euler_implicit_step(d.model, d.contacts, d.x, d.model.zero_input(), dt);
  EXPECT_NEAR(r.state.v(0), 1.0 / (1.0 + 20.0 * dt), 1e-8);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.newton_iterations, 1);
  EXPECT_LE(r.report.residual, 1e-6);
}

TEST(EulerImplicit, BallisticVelocityMatchesExplicit) {
  const PointMass3D m(1.0);
  auto c1 = default_contacts(m), c2 = c1;
  const RobotState x{Vec3(0, 0, 1), Vec3(0.3, 0, 0.2)};
  const auto imp = euler_implicit_step(m, c1, x, m.zero_input(), 0.01);
  const auto exp = euler_explicit_step(m, c2, x, m.zero_input(), 0.01);
  EXPECT_LE((imp.state.v - exp.state.v).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((imp.state.q - (x.q + 0.01 * imp.state.v)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EulerImplicit, StiffOscillatorDecaysWithoutGainingEnergy) {
  const PointMass3D m(1.0);
  auto c = default_contacts(m);
  RobotState x{Vec3(0, 0, -0.002), Vec3(0, 0, -0.5)};
  auto energy = [&](const RobotState& s) {
    double e = 0.5 * s.v.squaredNorm() + kGravity * s.q(2);
    if (s.q(2) < 0) e += 0.5 * 1e5 * s.q(2) * s.q(2);
    return e;
  };
  double e = energy(x);
  for (int i = 0; i < 100; ++i) {
    const auto r = euler_implicit_step(m, c, x, m.zero_input(), 0.01);
    x = r.state;
    const double e1 = energy(x);
    EXPECT_LE(e1, e + 1e-9) << "step " << i;
    e = e1;
  }
  EXPECT_NEAR(x.q(2), -kGravity / 1e5, 1e-6);
  EXPECT_LE(std::abs(x.v(2)), 1e-6);
}

TEST(EulerImplicit, ImpactNonConvergenceIsReportedNotThrown) {
  const Scenario s = make_scenario("box-drop");
  RobotState x = s.initial;
  auto c = s.initial_contacts();
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const auto r = euler_implicit_step(*s.model, c, x, s.model->zero_input(), 0.01);
    if (!r.report.converged) {
      ++failures;
      EXPECT_GT(r.report.residual, 1e-6);
      EXPECT_EQ(r.report.newton_iterations, 20);
    }
    x = r.state;
  }
  EXPECT_GE(failures, 1);
  EXPECT_TRUE(x.q.allFinite());
}

TEST(Steppers, RejectNonPositiveStep) {
  const PointMass3D m(1.0);
  for (IntegratorKind k : kAllKinds) {
    auto c = default_contacts(m);
    EXPECT_THROW(take(k, m, c, {Vec3(0, 0, 1), Vec3::Zero()}, 0.0, m.zero_input()),
                 std::invalid_argument);
  }
}

TEST(Steppers, NonFiniteStateThrows) {
  const PointMass3D m(1.0);
  for (IntegratorKind k : kAllKinds) {
    auto c = default_contacts(m);
    const RobotState x{Vec3(0, 0, 1), Vec3(0, 0, std::nan(""))};
    EXPECT_THROW(take(k, m, c, x, 0.01, m.zero_input()), IntegrationDivergedError)
        << to_string(k);
  }
}

}  // namespace
}  // namespace stiffsim
