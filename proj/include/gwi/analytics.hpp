#pragma once

#include "gwi/extended_real.hpp"
#include "gwi/process.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gwi {

enum class Criticality { kSubcritical, kCritical, kSupercritical };

[[nodiscard]] inline std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::kSubcritical: return "subcritical";
    case Criticality::kCritical: return "critical";
    case Criticality::kSupercritical: return "supercritical";
  }
  return "unknown";
}

/// Eigenstructure of the offspring mean matrix [[m_xi, m_eta], [1, 0]].
struct MeanStructure {
  double m_xi = 0.0;
  double m_eta = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double rho = 0.0;  // spectral radius, equal to lambda_plus
  Criticality criticality = Criticality::kSubcritical;
  bool primitive = false;  // M^2 has strictly positive entries
};

[[nodiscard]] inline MeanStructure mean_structure(double m_xi, double m_eta) {
  if (!(m_xi >= 0.0) || !(m_eta >= 0.0) || !std::isfinite(m_xi) || !std::isfinite(m_eta)) {
    throw std::invalid_argument("offspring means must be finite and non-negative");
  }
  MeanStructure ms;
  ms.m_xi = m_xi;
  ms.m_eta = m_eta;
  const double root = std::sqrt(m_xi * m_xi + 4.0 * m_eta);
  ms.lambda_plus = 0.5 * (m_xi + root);
  // m_xi - root loses everything when m_eta << m_xi^2; use the product of roots.
  ms.lambda_minus = ms.lambda_plus > 0.0 ? -m_eta / ms.lambda_plus : 0.0;
  ms.rho = ms.lambda_plus;
  const double total = m_xi + m_eta;
  ms.criticality = total < 1.0    ? Criticality::kSubcritical
                   : total == 1.0 ? Criticality::kCritical
                                  : Criticality::kSupercritical;
  ms.primitive = m_xi > 0.0 && m_eta > 0.0;
  return ms;
}

[[nodiscard]] inline MeanStructure mean_structure(const ModelParams& params) {
  const ExtendedReal a = mean(params.xi);
  const ExtendedReal b = mean(params.eta);
  if (a.is_infinite() || b.is_infinite()) {
    throw std::invalid_argument("offspring means must be finite");
  }
  return mean_structure(a.value(), b.value());
}

/// m_k = (lambda_+^{k+1} - lambda_-^{k+1}) / (lambda_+ - lambda_-), the mean of
/// the process without immigration started from (X_0, X_{-1}) = (1, 0).
/// m_{-1} = 0 is accepted for convenience.
[[nodiscard]] inline double m_seq(const MeanStructure& ms, int k) {
  if (k < -1) throw std::invalid_argument("m_seq needs k >= -1");
  if (k == -1) return 0.0;
  if (k == 0) return 1.0;
  const double gap = ms.lambda_plus - ms.lambda_minus;
  if (gap == 0.0) return 0.0;  // only m_xi = m_eta = 0
  return (std::pow(ms.lambda_plus, k + 1) - std::pow(ms.lambda_minus, k + 1)) / gap;
}

using Matrix2 = std::array<std::array<double, 2>, 2>;

[[nodiscard]] inline Matrix2 mean_matrix(const MeanStructure& ms) {
  return Matrix2{{{ms.m_xi, ms.m_eta}, {1.0, 0.0}}};
}

/// M^n from the spectral decomposition.
[[nodiscard]] inline Matrix2 matrix_power(const MeanStructure& ms, int n) {
  if (n < 0) throw std::invalid_argument("matrix_power needs n >= 0");
  if (n == 0) return Matrix2{{{1.0, 0.0}, {0.0, 1.0}}};
  const double lp = ms.lambda_plus;
  const double lm = ms.lambda_minus;
  const double gap = lp - lm;
  if (gap == 0.0) {
    // M = [[0, 0], [1, 0]] is nilpotent.
    return n == 1 ? mean_matrix(ms) : Matrix2{{{0.0, 0.0}, {0.0, 0.0}}};
  }
  const double a = std::pow(lp, n) / gap;
  const double b = std::pow(lm, n) / gap;
  return Matrix2{{{a * lp - b * lm, (a - b) * ms.m_eta}, {a - b, -a * lm + b * lp}}};
}

/// E(X_n) from the matrix form of the mean recursion:
///   m_n E X_0 + m_{n-1} m_eta E X_{-1} + m_eps sum_{j<n} m_j.
[[nodiscard]] inline double expectation(const MeanStructure& ms, int n, double ex0, double exm1,
                                        double m_eps) {
  if (n < 0) throw std::invalid_argument("expectation needs n >= 0");
  if (n == 0) return ex0;
  long double immigrant_weight = 0.0L;
  for (int j = 0; j < n; ++j) immigrant_weight += m_seq(ms, j);
  return m_seq(ms, n) * ex0 + m_seq(ms, n - 1) * ms.m_eta * exm1 +
         m_eps * static_cast<double>(immigrant_weight);
}

/// Limit of E(X_n) in the subcritical regime, m_eps / ((1 - lambda_+)(1 - lambda_-)).
[[nodiscard]] inline double stationary_mean(const MeanStructure& ms, double m_eps) {
  if (ms.criticality != Criticality::kSubcritical) {
    throw std::invalid_argument("stationary mean needs m_xi + m_eta < 1");
  }
  return m_eps / ((1.0 - ms.lambda_plus) * (1.0 - ms.lambda_minus));
}

/// rho^n E X_0 + rho^{n-1} m_eta E X_{-1}, an upper bound for E(X_n) without
/// immigration.
[[nodiscard]] inline double first_moment_bound(const MeanStructure& ms, int n, double ex0,
                                               double exm1) {
  if (n < 0) throw std::invalid_argument("first_moment_bound needs n >= 0");
  if (n == 0) return ex0;
  return std::pow(ms.rho, n) * ex0 + std::pow(ms.rho, n - 1) * ms.m_eta * exm1;
}

/// Var(X_n) for (X_0, X_{-1}) = (1, 0):
///   Var(xi) sum_{j=0}^{n-1} m_j^2 m_{n-j-1} + Var(eta) sum_{j=0}^{n-2} m_j^2 m_{n-j-2}.
[[nodiscard]] inline double variance_xn(const MeanStructure& ms, double var_xi, double var_eta,
                                        int n) {
  if (n < 1) throw std::invalid_argument("variance_xn needs n >= 1");
  long double a = 0.0L;
  long double b = 0.0L;
  for (int j = 0; j <= n - 1; ++j) {
    const double mj = m_seq(ms, j);
    a += static_cast<long double>(mj * mj) * m_seq(ms, n - j - 1);
    if (j <= n - 2) b += static_cast<long double>(mj * mj) * m_seq(ms, n - j - 2);
  }
  return var_xi * static_cast<double>(a) + var_eta * static_cast<double>(b);
}

/// Constants of the second-moment bound; each is only meaningful in its own
/// regime and is left at 0 elsewhere.
struct MomentBounds {
  double c_sub = 0.0;
  double c_crit = 0.0;
  double c_sup = 0.0;
};

[[nodiscard]] inline MomentBounds moment_bounds(const MeanStructure& ms, double var_xi,
                                                double var_eta) {
  if (!(ms.rho > 0.0)) throw std::invalid_argument("moment bounds need rho > 0");
  const double r = ms.rho;
  MomentBounds c;
  switch (ms.criticality) {
    case Criticality::kSubcritical:
      c.c_sub = 1.0 + var_xi / (r * (1.0 - r)) + var_eta / (r * r * (1.0 - r));
      break;
    case Criticality::kCritical:
      c.c_crit = 1.0 + var_xi + var_eta;
      break;
    case Criticality::kSupercritical:
      c.c_sup = 1.0 + var_xi / (r * (r - 1.0)) + var_eta / (r * r * r * (r - 1.0));
      break;
  }
  return c;
}

/// Upper bound on E(X_n^2) for (X_0, X_{-1}) = (1, 0): c_SUB rho^n,
/// c_CRIT n or c_SUP rho^{2n}, by regime.
[[nodiscard]] inline double second_moment_bound(const MeanStructure& ms, double var_xi,
                                                double var_eta, int n) {
  if (n < 1) throw std::invalid_argument("second_moment_bound needs n >= 1");
  const MomentBounds c = moment_bounds(ms, var_xi, var_eta);
  switch (ms.criticality) {
    case Criticality::kSubcritical: return c.c_sub * std::pow(ms.rho, n);
    case Criticality::kCritical: return c.c_crit * n;
    case Criticality::kSupercritical: return c.c_sup * std::pow(ms.rho, 2 * n);
  }
  return 0.0;
}

/// Sufficient condition for E(X_n^r) < inf for every n: finite r-th moments
/// of X_0, X_{-1}, xi and eta. A false result makes no claim either way.
[[nodiscard]] inline bool moment_finite(double r, const ExtendedReal& x0_r,
                                        const ExtendedReal& xm1_r, const ExtendedReal& xi_r,
                                        const ExtendedReal& eta_r) {
  if (!(r > 1.0)) throw std::invalid_argument("moment_finite needs r > 1");
  return x0_r.is_finite() && xm1_r.is_finite() && xi_r.is_finite() && eta_r.is_finite();
}

struct TruncatedSeries {
  double value = 0.0;
  int terms_used = 0;          // summed over i = 0..N
  double remainder_bound = 0.0;
};

/// sum_{i>=0} m_i^alpha, truncated at the first N whose remainder bound
/// rho^{(N+1) alpha} / (1 - rho^alpha) falls below tol (m_i <= rho^i).
[[nodiscard]] inline TruncatedSeries stationary_tail_constant(const MeanStructure& ms,
                                                              double alpha, double tol) {
  if (!(ms.m_xi > 0.0) || !(ms.m_eta > 0.0) || ms.criticality != Criticality::kSubcritical) {
    throw PreconditionError(
        "stationary tail constant needs m_xi > 0, m_eta > 0 and m_xi + m_eta < 1");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const double ra = std::pow(ms.rho, alpha);
  TruncatedSeries out;
  long double sum = 0.0L;
  int i = 0;
  for (;; ++i) {
    sum += std::pow(m_seq(ms, i), alpha);
    const double bound = std::pow(ra, i + 1) / (1.0 - ra);
    if (bound < tol) {
      out.remainder_bound = bound;
      break;
    }
  }
  out.value = static_cast<double>(sum);
  out.terms_used = i;
  return out;
}

/// sum_{i>=0} m_xi^{i alpha} = 1 / (1 - m_xi^alpha) for the first-order process.
[[nodiscard]] inline double first_order_constant(double m_xi, double alpha) {
  if (!(m_xi > 0.0 && m_xi < 1.0)) throw std::invalid_argument("m_xi must lie in (0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return 1.0 / (1.0 - std::pow(m_xi, alpha));
}

enum class TailCase { kX0Dominates, kEqualIndex, kXm1Dominates };

/// Limit of P(X_n > x) relative to the initial tails: coef_x0 multiplies
/// P(X_0 > x) and coef_xm1 multiplies P(X_{-1} > x); the coefficient of the
/// lighter side is 0.
struct TailPrediction {
  TailCase tail_case = TailCase::kX0Dominates;
  double coef_x0 = 0.0;
  double coef_xm1 = 0.0;
};

/// Indices beta0 and betam1 of X_0 and X_{-1}; +inf marks a light tail.
[[nodiscard]] inline TailPrediction predicted_tail_ratio(const MeanStructure& ms, int n,
                                                         const ExtendedReal& beta0,
                                                         const ExtendedReal& betam1) {
  if (n < 1) throw std::invalid_argument("predicted_tail_ratio needs n >= 1");
  if (!(ms.m_xi > 0.0)) throw std::invalid_argument("predicted_tail_ratio needs m_xi > 0");
  if (beta0.is_infinite() && betam1.is_infinite()) {
    throw std::invalid_argument("at least one initial law must be regularly varying");
  }
  TailPrediction out;
  auto x0_coef = [&] { return std::pow(m_seq(ms, n), beta0.value()); };
  auto xm1_coef = [&] {
    if (!(ms.m_eta > 0.0)) {
      throw std::invalid_argument("two-sided tail prediction needs m_eta > 0");
    }
    return std::pow(m_seq(ms, n - 1) * ms.m_eta, betam1.value());
  };
  if (beta0 < betam1) {
    out.tail_case = TailCase::kX0Dominates;
    out.coef_x0 = x0_coef();
  } else if (beta0 == betam1) {
    out.tail_case = TailCase::kEqualIndex;
    out.coef_x0 = x0_coef();
    out.coef_xm1 = xm1_coef();
  } else {
    out.tail_case = TailCase::kXm1Dominates;
    out.coef_xm1 = xm1_coef();
  }
  return out;
}

}  // namespace gwi
