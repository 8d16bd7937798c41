#pragma once

// Dense matrix exponential by scaling and squaring with diagonal Padé
// approximants, plus the first and second time integrals of the solution of
// an affine linear system, obtained from the exponential of an augmented
// matrix.

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace stiffsim {

// Selects the Padé order and the scaling strategy of the kernel.
//
// Reduced policies are indexed by the number of matrix-matrix products they
// cost (0..4 -> order 1, 2, 3, 5, 7) and never scale the argument. The full
// policy uses order 13 with the scaling exponent chosen from the 1-norm so
// that the result is accurate to double precision.
class PadePolicy {
 public:
  static constexpr int kFullOrder = 13;
  static constexpr int kMaxReducedMmm = 4;

  static PadePolicy full() { return PadePolicy(-1); }
  static PadePolicy reduced(int mmm);
  // Accepts "full" or an integer 0..4.
  static PadePolicy parse(std::string_view text);

  bool is_full() const { return mmm_ < 0; }
  int order() const;
  // Matrix-matrix products spent on the Padé numerator/denominator.
  int mmm() const { return is_full() ? 6 : mmm_; }
  // Scaling exponent s used for an argument of the given 1-norm.
  int scaling_for(double norm1) const;
  std::string name() const;

  friend bool operator==(const PadePolicy&, const PadePolicy&) = default;

 private:
  explicit PadePolicy(int mmm) : mmm_(mmm) {}
  int mmm_;
};

struct BalanceResult {
  // Positive powers of two; balanced = diag(scale)^-1 * A * diag(scale).
  Eigen::VectorXd scale;
  Eigen::MatrixXd balanced;
};

// Iterative two-sided equilibration of off-diagonal row and column 1-norms
// with power-of-two factors, so the similarity is exact in floating point.
BalanceResult balance(const Eigen::MatrixXd& a);

// exp(A) per the given policy.
Eigen::MatrixXd pade_expm(const Eigen::MatrixXd& a,
                          const PadePolicy& policy = PadePolicy::full());

// exp(A) * V without forming exp(A) when the policy does not scale:
// N_j(A) V is formed first and D_j(A) X = N_j(A) V is then solved.
Eigen::MatrixXd expm_multiply(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& v,
                              const PadePolicy& policy = PadePolicy::full());

struct ExpIntegrals {
  Eigen::VectorXd x_int;   // int_0^dt x(s) ds
  Eigen::VectorXd x_int2;  // int_0^dt int_0^s x(r) dr ds
};

// Integrals of the solution of x' = A x + b, x(0) = x0 over [0, dt].
// The (n+3)x(n+3) augmented matrix [A b x0 0; 0 0 1 0; 0 0 0 1; 0 0 0 0]
// is scaled by dt, balanced and exponentiated against its last two unit
// columns.
ExpIntegrals compute_integrals(const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& b,
                               const Eigen::VectorXd& x0, double dt,
                               const PadePolicy& policy = PadePolicy::full());

}  // namespace stiffsim
