#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace gwi::detail {

struct SeriesSum {
  double value = 0.0;
  /// Bound on |value - exact sum| from the remainder approximation.
  double error_bound = 0.0;
  /// Number of terms summed directly before the remainder was approximated.
  std::uint64_t direct_terms = 0;
};

/// log f(t) split as slope * log(t) + rest, so that power laws with equal
/// and opposite exponents cancel exactly instead of through rounding.
struct LogTerm {
  double slope = 0.0;
  double rest = 0.0;
};

/// Sum f(k) for k = first, first+1, ... to infinity, where the terms are
/// given in log form by log_f(t, ell) -> LogTerm with ell = log t. `t` may be
/// +inf when ell is large, so log_f must rely on ell there.
///
/// f must be positive, smooth and eventually decreasing beyond `smooth_from`.
/// Terms are summed directly up to K and the remainder is replaced by the
/// Euler-Maclaurin expansion
///   int_K^inf f + f(K)/2 - f'(K)/12.
/// The integral is taken over v with t = exp(log K + e^v - 1), which turns
/// both power and power-of-log decay into exponential decay for exp-sinh
/// quadrature. The leftover is bounded by |f'(K)|/K^2 plus the quadrature
/// error. K starts at max(first + min_direct, smooth_from + 16) and grows
/// tenfold until the bound drops below rel_tol times the sum.
template <class LogF>
SeriesSum sum_series(LogF&& log_f, std::uint64_t first, std::uint64_t smooth_from,
                     double rel_tol = 1e-10, std::uint64_t min_direct = 10000) {
  constexpr std::uint64_t kMaxDirect = 100'000'000;
  std::uint64_t K = std::max<std::uint64_t>(first + min_direct, smooth_from + 16);
  auto f = [&](double t) {
    const double ell = std::log(t);
    const LogTerm lt = log_f(t, ell);
    return std::exp(lt.slope == 0.0 ? lt.rest : lt.slope * ell + lt.rest);
  };

  long double direct = 0.0L;
  std::uint64_t k = first;
  boost::math::quadrature::exp_sinh<double> integrator;

  for (;;) {
    for (; k < K; ++k) direct += static_cast<long double>(f(static_cast<double>(k)));

    const double Kd = static_cast<double>(K);
    const double base = std::log(Kd);
    auto integrand = [&](double v) {
      const double ev = std::exp(v);
      const double ell = base + ev - 1.0;
      if (!std::isfinite(ell)) return 0.0;
      const LogTerm lt = log_f(std::exp(ell), ell);
      // f(t) t dt/dv with dt/dv = t e^v.
      const double slope = lt.slope + 1.0;
      const double g = std::exp((slope == 0.0 ? 0.0 : slope * ell) + lt.rest + v);
      return std::isfinite(g) ? g : 0.0;
    };
    double quad_err = 0.0;
    const double integral = integrator.integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &quad_err);
    const double h = Kd * 1e-4;
    const double deriv = (f(Kd + h) - f(Kd - h)) / (2.0 * h);
    const double tail = integral + 0.5 * f(Kd) - deriv / 12.0;
    const double value = static_cast<double>(direct) + tail;
    const double bound = std::fabs(deriv) / (Kd * Kd) + std::fabs(quad_err) +
                         1e-15 * std::fabs(integral);

    if (bound <= rel_tol * std::fabs(value) || K >= kMaxDirect) {
      return SeriesSum{value, bound, K - first};
    }
    K *= 10;
  }
}

}  // namespace gwi::detail
