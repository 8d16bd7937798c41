#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stiffsim/contact.hpp"

namespace stiffsim {
namespace {

ContactPointState active_point(const Vec3& anchor = Vec3::Zero()) {
  ContactPointState cp;
  cp.active = true;
  cp.anchor = anchor;
  cp.stiffness = Vec3::Constant(1e5);
  cp.damping = Vec3::Constant(300.0);
  cp.mu = 1.0;
  return cp;
}

ContactPointKinematics at(const Vec3& p, const Vec3& pdot = Vec3::Zero()) {
  ContactPointKinematics k;
  k.p = p;
  k.pdot = pdot;
  k.jacobian = Eigen::MatrixXd::Identity(3, 3);
  return k;
}

TEST(Detect, PenetratingPointActivatesWithGroundAnchor) {
  std::vector<ContactPointState> c = make_contacts(1, ContactParams{});
  detect_and_update(ContactKinematics{at(Vec3(0.1, 0, -0.001), Vec3(1, 2, -3))}, c);
  EXPECT_TRUE(c[0].active);
  EXPECT_EQ(c[0].anchor, Vec3(0.1, 0, 0));
  EXPECT_EQ(c[0].anchor_velocity, Vec3::Zero());
}

TEST(Detect, PointAboveGroundReleases) {
  std::vector<ContactPointState> c{active_point()};
  detect_and_update(ContactKinematics{at(Vec3(0, 0, 0.002))}, c);
  EXPECT_FALSE(c[0].active);
}

TEST(Detect, OtherPointsUnchanged) {
  std::vector<ContactPointState> c = make_contacts(2, ContactParams{});
  c[1] = active_point(Vec3(0.3, 0.2, 0));
  c[1].anchor_velocity = Vec3(0.1, 0, 0);
  const auto before = c;
  detect_and_update(
      ContactKinematics{at(Vec3(0, 0, 0.5)), at(Vec3(0.5, 0.5, -0.01))}, c);
  EXPECT_FALSE(c[0].active);
  EXPECT_EQ(c[0].anchor, before[0].anchor);
  EXPECT_TRUE(c[1].active);
  EXPECT_EQ(c[1].anchor, before[1].anchor);
  EXPECT_EQ(c[1].anchor_velocity, before[1].anchor_velocity);
}

TEST(Detect, ModelOverloadUsesContactKinematics) {
  const PointMass3D m(1.0);
  std::vector<ContactPointState> c = make_contacts(1, ContactParams{});
  detect_and_update(m, Vec3(0.2, -0.1, -0.003), Vec3::Zero(), c);
  EXPECT_TRUE(c[0].active);
  EXPECT_EQ(c[0].anchor, Vec3(0.2, -0.1, 0));
}

TEST(SpringDamper, DefaultParameters) {
  const ContactPointState cp = active_point();
  EXPECT_TRUE(spring_damper_force(cp, Vec3(0, 0, -0.001), Vec3::Zero())
                  .isApprox(Vec3(0, 0, 100), 1e-12));
  EXPECT_NEAR(spring_damper_force(cp, Vec3(0, 0, -0.001), Vec3(0, 0, -0.1)).z(),
              130.0, 1e-10);
  EXPECT_TRUE(spring_damper_force(cp, Vec3(0.002, 0, -0.001), Vec3::Zero())
                  .isApprox(Vec3(-200, 0, 100), 1e-12));
}

TEST(SpringDamper, AnchorVelocityEntersDamping) {
  ContactPointState cp = active_point(Vec3(0.1, 0, 0));
  cp.anchor_velocity = Vec3(0.5, 0, 0);
  const Vec3 f = spring_damper_force(cp, Vec3(0.1, 0, 0), Vec3(0.5, 0, 0));
  EXPECT_EQ(f, Vec3::Zero());
}

TEST(Params, DampingRatioConvention) {
  EXPECT_NEAR(damping_ratio(1e5, 300), 300 / (2 * std::sqrt(1e5)), 1e-15);
  EXPECT_NEAR(damping_ratio(1e5, 300), 0.474, 1e-3);
  EXPECT_NEAR(damping_from_ratio(1e4, 0.5), 100.0, 1e-12);
  const auto p = ContactParams::from_damping_ratio(1e6, 1.0, 0.7);
  EXPECT_EQ(p.stiffness, Vec3::Constant(1e6));
  EXPECT_NEAR(p.damping.z(), 2000.0, 1e-9);
  EXPECT_EQ(p.mu, 0.7);
  const auto c = make_contacts(3, p);
  ASSERT_EQ(c.size(), 3u);
  for (const auto& cp : c) {
    EXPECT_FALSE(cp.active);
    EXPECT_EQ(cp.stiffness, p.stiffness);
    EXPECT_EQ(cp.damping, p.damping);
    EXPECT_EQ(cp.mu, 0.7);
  }
}

TEST(FrictionCone, Examples) {
  auto r = project_friction_cone(Vec3(0.5, 0, 1), 1.0);
  EXPECT_TRUE(r.inside);
  EXPECT_EQ(r.projected, Vec3(0.5, 0, 1));

  r = project_friction_cone(Vec3(6, 8, 5), 1.0);
  EXPECT_FALSE(r.inside);
  EXPECT_TRUE(r.projected.isApprox(Vec3(3, 4, 5), 1e-15));

  r = project_friction_cone(Vec3(1, 0, -2), 1.0);
  EXPECT_FALSE(r.inside);
  EXPECT_EQ(r.projected, Vec3::Zero());
}

TEST(FrictionCone, ZeroFrictionKeepsOnlyNormal) {
  const auto r = project_friction_cone(Vec3(1, -1, 3), 0.0);
  EXPECT_EQ(r.projected, Vec3(0, 0, 3));
}

TEST(FrictionCone, FuzzedProjectionProperties) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> f(-100, 100);
  std::uniform_real_distribution<double> mu_dist(0, 2);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 force(f(rng), f(rng), f(rng));
    const double mu = mu_dist(rng);
    const auto r = project_friction_cone(force, mu);
    const Vec3& p = r.projected;
    EXPECT_GE(p.z(), 0.0);
    EXPECT_LE(p.head<2>().norm(), mu * p.z() + 1e-12);
    const auto again = project_friction_cone(p, mu);
    EXPECT_EQ(again.projected, p);
    if (r.inside) {
      EXPECT_EQ(p, force);
    } else if (force.z() >= 0) {
      EXPECT_EQ(p.z(), force.z());
      // Tangential direction is kept.
      EXPECT_NEAR(p.head<2>().normalized().dot(force.head<2>().normalized()),
                  p.head<2>().norm() > 0 ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(AnchorSlip, PositionFromProjectedForce) {
  const ContactPointState cp = active_point(Vec3(0.02, 0, 0));
  const Vec3 p(0.01, 0, -0.001);
  const auto out = anchor_slip_update(cp, p, Vec3::Zero(), Vec3(-50, 0, 100));
  EXPECT_NEAR(out.anchor.x(), 0.0095, 1e-15);
  EXPECT_NEAR(out.anchor.y(), 0.0, 1e-15);
  EXPECT_EQ(out.anchor.z(), cp.anchor.z());
}

TEST(AnchorSlip, ZeroForceSnapsAnchorToPoint) {
  const ContactPointState cp = active_point(Vec3(0.3, -0.2, 0));
  const Vec3 p(0.1, 0.05, -0.002);
  const auto out = anchor_slip_update(cp, p, Vec3::Zero(), Vec3(0, 0, 200));
  EXPECT_EQ(out.anchor.x(), p.x());
  EXPECT_EQ(out.anchor.y(), p.y());
  EXPECT_EQ(out.anchor.z(), 0.0);
}

TEST(AnchorSlip, AnchorVelocityFollowsPoint) {
  ContactPointState cp = active_point();
  cp.anchor_velocity = Vec3(0, 0, 0.3);
  const auto out =
      anchor_slip_update(cp, Vec3(0, 0, -0.001), Vec3(0.2, 0, -0.05), Vec3(0, 0, 100));
  EXPECT_EQ(out.anchor_velocity.x(), 0.2);
  EXPECT_EQ(out.anchor_velocity.y(), 0.0);
  EXPECT_EQ(out.anchor_velocity.z(), 0.3);
}

TEST(AnchorSlip, RecomputedForceMatchesTargetTangent) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    ContactPointState cp = active_point(Vec3(u(rng), u(rng), 0));
    cp.stiffness = Vec3(1e5 * (1.5 + u(rng)), 1e5 * (1.5 + u(rng)), 1e5);
    cp.damping = Vec3(300 * (1.5 + u(rng)), 300 * (1.5 + u(rng)), 300);
    const Vec3 p(u(rng), u(rng), -0.01 * std::abs(u(rng)));
    const Vec3 pdot(u(rng), u(rng), u(rng));
    const Vec3 target = project_friction_cone(
        Vec3(500 * u(rng), 500 * u(rng), 300 * (1 + u(rng))), cp.mu).projected;
    const auto out = anchor_slip_update(cp, p, pdot, target);
    const Vec3 f = spring_damper_force(out, p, pdot);
    for (int j = 0; j < 2; ++j) {
      // Storing p0 = p + f / K rounds at the scale of |p|.
      const double rounding =
          4e-16 * out.stiffness(j) * (std::abs(p(j)) + std::abs(out.anchor(j)));
      EXPECT_NEAR(f(j), target(j), 1e-12 * std::abs(target(j)) + rounding);
    }
  }
}

// Sliding at the cone boundary with constant normal force: keeping the
// spring-damper tangential force constant forces the anchor-point velocity
// mismatch to obey e' = -(K / B) e.
double mismatch_ratio_after(double k, double b, double t_end) {
  ContactPointState cp = active_point();
  cp.stiffness = Vec3::Constant(k);
  cp.damping = Vec3::Constant(b);
  const double slide = 0.4;  // contact point velocity, m/s
  double p = 0.0, p0 = 0.0005, v0 = 0.0;
  cp.anchor = Vec3(p0, 0, 0);
  const double f0 = spring_damper_force(cp, Vec3(p, 0, 0), Vec3(slide, 0, 0)).x();
  const int n = 100000;
  const double h = t_end / n;
  for (int i = 0; i < n; ++i) {
    // d/dt f = 0 gives B (v0' - 0) = -K (v0 - slide).
    auto rate = [&](double v) { return -k / b * (v - slide); };
    const double k1 = rate(v0), k2 = rate(v0 + 0.5 * h * k1),
                 k3 = rate(v0 + 0.5 * h * k2), k4 = rate(v0 + h * k3);
    const double dv = h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    p0 += h * (v0 + 0.5 * dv);
    v0 += dv;
    p += h * slide;
  }
  cp.anchor = Vec3(p0, 0, 0);
  cp.anchor_velocity = Vec3(v0, 0, 0);
  const double f1 = spring_damper_force(cp, Vec3(p, 0, 0), Vec3(slide, 0, 0)).x();
  EXPECT_NEAR(f1, f0, 1e-6 * std::abs(f0));
  return std::abs(v0 - slide) / slide;
}

TEST(AnchorSlip, MismatchDecaysAtStiffnessOverDamping) {
  EXPECT_LE(mismatch_ratio_after(1e5, 300, 3e-3), 0.40);
  EXPECT_NEAR(mismatch_ratio_after(1e5, 300, 3e-3), std::exp(-1.0), 1e-9);
  EXPECT_NEAR(mismatch_ratio_after(1e5, 100, 3e-3), 0.05, 0.01);
}

}  // namespace
}  // namespace stiffsim
