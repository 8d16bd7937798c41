#include "stiffsim/expm.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "stiffsim/errors.hpp"

namespace stiffsim {

namespace {

using Eigen::MatrixXd;

constexpr std::array<int, 5> kReducedOrders = {1, 2, 3, 5, 7};

// Largest 1-norm for which the order-13 approximant is accurate to unit
// roundoff (Higham 2005).
constexpr double kTheta13 = 5.371920351148152;

// Diagonal Padé coefficients c_k of N_m(x) = sum c_k x^k, c_0 = 1;
// D_m(x) = N_m(-x).
std::array<double, 14> pade_coefficients(int m) {
  std::array<double, 14> c{};
  c[0] = 1.0;
  for (int k = 1; k <= m; ++k) {
    c[k] = c[k - 1] * double(m - k + 1) / double(k * (2 * m - k + 1));
  }
  return c;
}

// Even part V and odd part U of N_m(A), so N = V + U and D = V - U.
struct PadeParts {
  MatrixXd even;
  MatrixXd odd;
};

PadeParts pade_parts(const MatrixXd& a, int m) {
  const auto c = pade_coefficients(m);
  const auto n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  PadeParts parts;

  if (m == 13) {
    const MatrixXd a2 = a * a;
    const MatrixXd a4 = a2 * a2;
    const MatrixXd a6 = a4 * a2;
    const MatrixXd u_inner = a6 * (c[13] * a6 + c[11] * a4 + c[9] * a2) +
                             c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * id;
    parts.odd = a * u_inner;
    parts.even = a6 * (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 +
                 c[4] * a4 + c[2] * a2 + c[0] * id;
    return parts;
  }

  // Even powers A^2, A^4, A^6 as far as the order needs them; one more
  // product forms U unless the odd polynomial is a scalar (m <= 2).
  std::array<MatrixXd, 4> even_pow;
  even_pow[0] = id;
  const int max_even = m / 2;
  const int max_odd = (m - 1) / 2;
  const int needed = std::max(max_even, max_odd);
  for (int k = 1; k <= needed; ++k) {
    even_pow[k] = (k == 1) ? MatrixXd(a * a)
                           : MatrixXd(even_pow[k - 1] * even_pow[1]);
  }
  parts.even = MatrixXd::Zero(n, n);
  for (int k = 0; k <= max_even; ++k) parts.even += c[2 * k] * even_pow[k];
  if (max_odd == 0) {
    parts.odd = c[1] * a;
  } else {
    MatrixXd inner = MatrixXd::Zero(n, n);
    for (int k = 0; k <= max_odd; ++k) inner += c[2 * k + 1] * even_pow[k];
    parts.odd = a * inner;
  }
  return parts;
}

Eigen::PartialPivLU<MatrixXd> factor_denominator(const MatrixXd& d) {
  Eigen::PartialPivLU<MatrixXd> lu(d);
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw SingularDenominatorError(
        "Pade denominator is numerically singular (rcond = " +
        std::to_string(rcond) + "); order too low for the argument norm");
  }
  return lu;
}

double norm1(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

PadePolicy PadePolicy::reduced(int mmm) {
  if (mmm < 0 || mmm > kMaxReducedMmm) {
    throw std::invalid_argument("mmm must be in 0..4, got " +
                                std::to_string(mmm));
  }
  return PadePolicy(mmm);
}

PadePolicy PadePolicy::parse(std::string_view text) {
  if (text == "full") return full();
  if (text.size() == 1 && text[0] >= '0' && text[0] <= '4') {
    return reduced(text[0] - '0');
  }
  throw std::invalid_argument("invalid mmm policy '" + std::string(text) +
                              "' (expected 0..4 or full)");
}

int PadePolicy::order() const {
  return is_full() ? kFullOrder : kReducedOrders[mmm_];
}

int PadePolicy::scaling_for(double norm) const {
  if (!is_full() || !(norm > kTheta13)) return 0;
  return std::max(0, int(std::ceil(std::log2(norm / kTheta13))));
}

std::string PadePolicy::name() const {
  return is_full() ? "full" : std::to_string(mmm_);
}

BalanceResult balance(const MatrixXd& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadix2 = kRadix * kRadix;
  constexpr int kMaxSweeps = 200;

  const auto n = a.rows();
  BalanceResult out{Eigen::VectorXd::Ones(n), a};
  MatrixXd& m = out.balanced;

  bool done = false;
  for (int sweep = 0; !done && sweep < kMaxSweeps; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
      double c = m.col(i).cwiseAbs().sum() - std::abs(m(i, i));
      if (r == 0.0 || c == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / kRadix;
      while (c < g) {
        f *= kRadix;
        c *= kRadix2;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        out.scale(i) *= f;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
  return out;
}

MatrixXd pade_expm(const MatrixXd& a, const PadePolicy& policy) {
  const int s = policy.scaling_for(norm1(a));
  const MatrixXd scaled = std::ldexp(1.0, -s) * a;
  const PadeParts parts = pade_parts(scaled, policy.order());
  auto lu = factor_denominator(parts.even - parts.odd);
  MatrixXd r = lu.solve(MatrixXd(parts.even + parts.odd));
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

MatrixXd expm_multiply(const MatrixXd& a, const MatrixXd& v,
                       const PadePolicy& policy) {
  const int s = policy.scaling_for(norm1(a));
  const MatrixXd scaled = std::ldexp(1.0, -s) * a;
  const PadeParts parts = pade_parts(scaled, policy.order());
  auto lu = factor_denominator(parts.even - parts.odd);

  if (s == 0) {
    const MatrixXd v1 = parts.even * v + parts.odd * v;
    return lu.solve(v1);
  }

  MatrixXd r = lu.solve(MatrixXd(parts.even + parts.odd));
  const auto n = a.rows();
  const auto m = v.cols();
  // Repeated application costs 2^s thin products; squaring costs s full
  // products. Pick whichever is cheaper.
  if (s < 30 && (std::int64_t{1} << s) * m <= std::int64_t{s} * n) {
    MatrixXd w = v;
    for (std::int64_t k = 0; k < (std::int64_t{1} << s); ++k) w = r * w;
    return w;
  }
  for (int k = 0; k < s; ++k) r = r * r;
  return r * v;
}

ExpIntegrals compute_integrals(const MatrixXd& a, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& x0, double dt,
                               const PadePolicy& policy) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto n = a.rows();
  MatrixXd aug = MatrixXd::Zero(n + 3, n + 3);
  aug.topLeftCorner(n, n) = a;
  aug.block(0, n, n, 1) = b;
  aug.block(0, n + 1, n, 1) = x0;
  aug(n, n + 1) = 1.0;
  aug(n + 1, n + 2) = 1.0;
  aug *= dt;

  const BalanceResult bal = balance(aug);
  MatrixXd rhs = MatrixXd::Zero(n + 3, 2);
  rhs(n + 1, 0) = 1.0 / bal.scale(n + 1);
  rhs(n + 2, 1) = 1.0 / bal.scale(n + 2);
  const MatrixXd w = expm_multiply(bal.balanced, rhs, policy);

  ExpIntegrals out;
  const Eigen::VectorXd d = bal.scale.head(n);
  out.x_int = d.cwiseProduct(w.col(0).head(n));
  out.x_int2 = d.cwiseProduct(w.col(1).head(n));
  return out;
}

}  // namespace stiffsim
