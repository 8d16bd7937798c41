#pragma once

// Articulated-system abstraction: mass matrix, bias and actuation forces,
// contact-point kinematics and configuration-space integration, plus three
// small built-in models.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stiffsim {

constexpr double kGravity = 9.81;

using Vec3 = Eigen::Vector3d;

struct RobotState {
  Eigen::VectorXd q;  // configuration, may hold a scalar-first unit quaternion
  Eigen::VectorXd v;  // generalized velocity
};

struct ModelInfo {
  std::string name;
  int nq = 0;
  int nv = 0;
  int nc = 0;
  std::vector<std::string> contact_names;
  // Per velocity coordinate: whether the input vector may drive it.
  std::vector<bool> actuated;
  // Start of the (w, x, y, z) block in q and of the matching angular
  // velocity in v; -1 for Euclidean models.
  int quaternion_q = -1;
  int quaternion_v = -1;
};

struct ContactPointKinematics {
  Vec3 p = Vec3::Zero();
  Vec3 pdot = Vec3::Zero();
  Eigen::MatrixXd jacobian;  // 3 x nv, pdot = jacobian * v
  Vec3 drift = Vec3::Zero();  // Jdot * v
};

using ContactKinematics = std::vector<ContactPointKinematics>;

// Immutable description of a mechanical system M(q) vdot = u(q, v) + J^T f.
class Model {
 public:
  virtual ~Model() = default;

  virtual const ModelInfo& info() const = 0;

  virtual Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const = 0;

  // Gravity, velocity-product terms and the input tau (length nv, zeros on
  // unactuated coordinates).
  virtual Eigen::VectorXd nonlinear_and_actuation(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v,
      const Eigen::VectorXd& tau) const = 0;

  virtual ContactKinematics contact_kinematics(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v) const = 0;

  virtual double potential_energy(const Eigen::VectorXd& q) const = 0;

  double kinetic_energy(const Eigen::VectorXd& q,
                        const Eigen::VectorXd& v) const;

  // q (+) dq: Euclidean coordinates add, the quaternion block is
  // right-multiplied by the exponential of the body-frame rotation vector.
  Eigen::VectorXd integrate_configuration(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& dq) const;

  // q1 (-) q0, the tangent vector dq with q0 (+) dq = q1.
  Eigen::VectorXd difference_configuration(const Eigen::VectorXd& q1,
                                           const Eigen::VectorXd& q0) const;

  // (q1 (-) q2, v1 - v2), length 2 nv.
  Eigen::VectorXd state_difference(const RobotState& x1,
                                   const RobotState& x2) const;

  Eigen::VectorXd zero_input() const;
};

// Point mass in free space; q = v = position/velocity, one contact at the
// mass. The input is an external world-frame force.
class PointMass3D final : public Model {
 public:
  explicit PointMass3D(double mass);

  const ModelInfo& info() const override { return info_; }
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd nonlinear_and_actuation(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v,
      const Eigen::VectorXd& tau) const override;
  ContactKinematics contact_kinematics(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v) const override;
  double potential_energy(const Eigen::VectorXd& q) const override;

  double mass() const { return mass_; }

 private:
  double mass_;
  ModelInfo info_;
};

// Free-floating rigid box. q = (position, quaternion w x y z), v = (world
// linear velocity, body angular velocity); four contacts at the bottom
// corners. The input is a wrench (world force, body torque) at the centre.
class FreeBox3D final : public Model {
 public:
  FreeBox3D(double mass, const Vec3& inertia_diag, const Vec3& half_extents);
  // Uniform-density box of the given mass and half extents.
  static FreeBox3D uniform(double mass, const Vec3& half_extents);

  const ModelInfo& info() const override { return info_; }
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd nonlinear_and_actuation(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v,
      const Eigen::VectorXd& tau) const override;
  ContactKinematics contact_kinematics(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v) const override;
  double potential_energy(const Eigen::VectorXd& q) const override;

  double mass() const { return mass_; }
  const Vec3& inertia() const { return inertia_; }
  const Vec3& half_extents() const { return half_extents_; }
  const std::vector<Vec3>& corners() const { return corners_; }

  // Configuration with the given centre position and roll/pitch/yaw.
  static Eigen::VectorXd configuration(const Vec3& position, double roll,
                                       double pitch, double yaw);

 private:
  double mass_;
  Vec3 inertia_;
  Vec3 half_extents_;
  std::vector<Vec3> corners_;
  ModelInfo info_;
};

struct HopperParams {
  double body_mass = 4.0;
  double body_inertia = 0.05;  // pitch inertia about the hip
  double thigh_mass = 0.5;
  double thigh_length = 0.25;
  double shank_mass = 0.2;
  double shank_length = 0.25;
};

// Planar hopper in the x-z plane: floating base (x, z, pitch) with the hip
// at the body centre of mass, then actuated hip and knee. Links hang along
// -z at zero joint angles; one contact point at the foot (end of shank).
class PlanarHopper final : public Model {
 public:
  explicit PlanarHopper(const HopperParams& params = {});

  const ModelInfo& info() const override { return info_; }
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd nonlinear_and_actuation(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v,
      const Eigen::VectorXd& tau) const override;
  ContactKinematics contact_kinematics(
      const Eigen::VectorXd& q, const Eigen::VectorXd& v) const override;
  double potential_energy(const Eigen::VectorXd& q) const override;

  const HopperParams& params() const { return params_; }
  double total_mass() const;
  // Whole-body centre of mass in the x-z plane.
  Eigen::Vector2d center_of_mass(const Eigen::VectorXd& q) const;
  Eigen::Vector2d foot_position(const Eigen::VectorXd& q) const;

 private:
  struct Link {
    double mass;
    double inertia;
    Eigen::Vector2d com;
    Eigen::Matrix<double, 2, 5> jac;
    Eigen::Vector2d drift;
    Eigen::Matrix<double, 1, 5> angular_jac;
  };
  std::vector<Link> links(const Eigen::VectorXd& q,
                          const Eigen::VectorXd& v) const;

  HopperParams params_;
  ModelInfo info_;
};

}  // namespace stiffsim
