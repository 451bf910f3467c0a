#pragma once

#include "gwi/detail/series.hpp"
#include "gwi/dists.hpp"
#include "gwi/ensemble.hpp"
#include "gwi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwi {

// ---------------------------------------------------------------------------
// Reports

/// Empirical tail against a reference tail on an increasing grid.
struct TailReport {
  std::vector<double> levels;  // reference levels the grid was built from (may be empty)
  std::vector<double> x_grid;
  std::vector<double> empirical_tail;
  std::vector<double> reference_tail;
  std::vector<double> ratio;            // NaN where the reference vanishes
  std::vector<double> standard_errors;  // of the empirical tail
  std::vector<bool> unreliable;         // level below 1 / sample_count
  double predicted_limit = std::numeric_limits<double>::quiet_NaN();
  std::size_t sample_count = 0;

  /// Standard error of ratio[i], treating the reference as exact.
  [[nodiscard]] double ratio_se(std::size_t i) const {
    return reference_tail[i] > 0.0 ? standard_errors[i] / reference_tail[i]
                                   : std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

[[nodiscard]] inline std::string to_csv(const TailReport& r) {
  std::string out = "x,empirical,reference,ratio,se\n";
  for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
    out += detail::fmt17(r.x_grid[i]) + ',' + detail::fmt17(r.empirical_tail[i]) + ',' +
           detail::fmt17(r.reference_tail[i]) + ',' + detail::fmt17(r.ratio[i]) + ',' +
           detail::fmt17(r.standard_errors[i]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimators

/// Fraction of draws strictly greater than x.
[[nodiscard]] inline double empirical_tail(std::span<const Count> draws, double x) {
  if (draws.empty()) throw std::invalid_argument("empirical_tail needs samples");
  std::size_t above = 0;
  for (Count v : draws) above += static_cast<double>(v) > x;
  return static_cast<double>(above) / static_cast<double>(draws.size());
}

[[nodiscard]] inline double empirical_tail(const SampleSet& s, double x) {
  return empirical_tail(std::span<const Count>(s.draws), x);
}

struct HillEstimate {
  std::size_t k = 0;            // order statistics used
  std::size_t k_requested = 0;  // differs from k after tie reduction
  double alpha_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Hill estimator on the positive draws. When the (k+1)-th largest value ties
/// with the k-th, k is lowered to the largest value that breaks the tie.
template <class T>
[[nodiscard]] HillEstimate hill(std::span<const T> draws, std::size_t k) {
  if (k < 10) throw std::invalid_argument("hill needs k >= 10");
  std::vector<double> pos;
  pos.reserve(draws.size());
  for (const T& v : draws) {
    if (v > T{0}) pos.push_back(static_cast<double>(v));
  }
  if (pos.size() < k + 1) throw std::invalid_argument("hill needs at least k+1 positive draws");
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k + 1), pos.end(),
                    std::greater<>());
  std::size_t used = k;
  while (used > 0 && pos[used - 1] == pos[used]) --used;
  if (used < 10) throw std::invalid_argument("hill: too many ties at the threshold");
  const double threshold = std::log(pos[used]);
  long double spacing = 0.0L;
  for (std::size_t i = 0; i < used; ++i) spacing += std::log(pos[i]) - threshold;
  if (!(spacing > 0.0L)) throw std::invalid_argument("hill: degenerate sample");

  HillEstimate h;
  h.k = used;
  h.k_requested = k;
  h.alpha_hat = static_cast<double>(used / spacing);
  const double half = 1.96 / std::sqrt(static_cast<double>(used));
  h.ci_low = h.alpha_hat * (1.0 - half);
  h.ci_high = h.alpha_hat * (1.0 + half);
  return h;
}

[[nodiscard]] inline HillEstimate hill(const SampleSet& s, std::size_t k) {
  return hill(std::span<const Count>(s.draws), k);
}

namespace detail {

/// Levels sorted in decreasing order so that the quantile grid increases.
inline std::vector<double> checked_levels(std::vector<double> levels) {
  if (levels.empty()) throw std::invalid_argument("at least one level is required");
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

}  // namespace detail

/// Tail of `numerator` against the exact tail of `reference`, evaluated at the
/// reference quantiles of `levels`.
[[nodiscard]] inline TailReport tail_ratio_curve(std::span<const Count> numerator,
                                                 const DistSpec& reference,
                                                 std::vector<double> levels) {
  if (numerator.empty()) throw std::invalid_argument("tail_ratio_curve needs samples");
  TailReport r;
  r.levels = detail::checked_levels(std::move(levels));
  r.sample_count = numerator.size();
  std::vector<Count> sorted(numerator.begin(), numerator.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (double level : r.levels) {
    const double x = static_cast<double>(quantile(reference, level));
    const auto above = static_cast<double>(
        sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), static_cast<Count>(x)));
    const double p = above / n;
    const double ref = exact_tail(reference, x);
    r.x_grid.push_back(x);
    r.empirical_tail.push_back(p);
    r.reference_tail.push_back(ref);
    r.ratio.push_back(ref > 0.0 ? p / ref : std::numeric_limits<double>::quiet_NaN());
    r.standard_errors.push_back(std::sqrt(p * (1.0 - p) / n));
    r.unreliable.push_back(level < 1.0 / n);
  }
  return r;
}

[[nodiscard]] inline TailReport tail_ratio_curve(const SampleSet& numerator,
                                                 const DistSpec& reference,
                                                 std::vector<double> levels) {
  return tail_ratio_curve(std::span<const Count>(numerator.draws), reference, std::move(levels));
}

// ---------------------------------------------------------------------------
// Regular variation, deterministic checks

namespace detail {

inline const DiscretePareto& require_regularly_varying(const DistSpec& spec) {
  const auto* d = std::get_if<DiscretePareto>(&spec);
  if (d == nullptr) throw std::invalid_argument("spec is not regularly varying");
  return *d;
}

}  // namespace detail

struct KaramataPoint {
  double x = 0.0;
  double ratio = 0.0;
  double target = 0.0;
};

/// For alpha < 1: x T(x) / int_0^x T, which tends to 1 - alpha.
/// For alpha > 1: x T(x) / int_x^inf T, which tends to alpha - 1.
/// The integrals of the step tail are exact sums; the upper one is summed with
/// an Euler-Maclaurin remainder.
[[nodiscard]] inline std::vector<KaramataPoint> karamata_check(const DistSpec& spec,
                                                               std::vector<double> x_grid) {
  const DiscretePareto& d = detail::require_regularly_varying(spec);
  const double alpha = d.alpha();
  if (alpha == 1.0) throw std::invalid_argument("karamata_check needs alpha != 1");
  for (double x : x_grid) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("x must be positive");
  }
  std::sort(x_grid.begin(), x_grid.end());
  std::vector<KaramataPoint> out;
  out.reserve(x_grid.size());

  if (alpha < 1.0) {
    long double integral = 0.0L;  // sum_{k < next} T(k)
    Count next = 0;
    for (double x : x_grid) {
      const auto whole = static_cast<Count>(std::floor(x));
      for (; next < whole; ++next) integral += d.tail(static_cast<double>(next));
      const double tx = d.tail(x);
      const double area = static_cast<double>(integral) + (x - std::floor(x)) * tx;
      out.push_back({x, x * tx / area, 1.0 - alpha});
    }
    return out;
  }

  const auto plateau = static_cast<double>(d.plateau());
  for (double x : x_grid) {
    const double tx = d.tail(x);
    const double up = std::ceil(x);
    auto term = [&](double t, double ell) {
      return t < plateau ? detail::LogTerm{0.0, 0.0} : d.smooth_log_tail_parts(t, ell);
    };
    const double rest =
        detail::sum_series(term, static_cast<Count>(up), d.plateau(), 1e-12).value;
    const double area = (up - x) * tx + rest;
    out.push_back({x, x * tx / area, alpha - 1.0});
  }
  return out;
}

struct PotterResult {
  bool found = false;
  double x0 = 0.0;             // smallest search-grid point beyond which the bounds hold
  std::size_t violations = 0;  // failures on the verification grid beyond x0
  std::size_t checked = 0;     // verification grid size
};

/// Checks (1-delta) q^{-alpha-delta} < T(qx)/T(x) < (1+delta) q^{-alpha+delta}.
/// x0 is searched on the integers 1..x0_search_max; the bounds are then
/// re-verified on a log grid from x0 to x0_search_max * 1e6.
[[nodiscard]] inline PotterResult potter_check(const DistSpec& spec, double delta,
                                               const std::vector<double>& q_grid,
                                               Count x0_search_max) {
  const DiscretePareto& d = detail::require_regularly_varying(spec);
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (q_grid.empty()) throw std::invalid_argument("q_grid must be non-empty");
  for (double q : q_grid) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must be >= 1");
  }
  if (x0_search_max < 1) throw std::invalid_argument("x0_search_max must be positive");
  const double alpha = d.alpha();

  auto holds = [&](double x) {
    const double lx = d.log_tail(x);
    for (double q : q_grid) {
      const double log_ratio = d.log_tail(q * x) - lx;
      const double lo = std::log1p(-delta) - (alpha + delta) * std::log(q);
      const double hi = std::log1p(delta) - (alpha - delta) * std::log(q);
      if (!(log_ratio > lo && log_ratio < hi)) return false;
    }
    return true;
  };

  PotterResult r;
  Count last_fail = 0;
  for (Count x = 1; x <= x0_search_max; ++x) {
    if (!holds(static_cast<double>(x))) last_fail = x;
  }
  if (last_fail == x0_search_max) return r;
  r.found = true;
  r.x0 = static_cast<double>(last_fail + 1);

  const double top = static_cast<double>(x0_search_max) * 1e6;
  constexpr int kPerDecade = 50;
  for (double lx = std::log10(r.x0); lx <= std::log10(top) + 1e-12; lx += 1.0 / kPerDecade) {
    const double x = std::max(r.x0, std::round(std::pow(10.0, lx)));
    ++r.checked;
    if (!holds(x)) ++r.violations;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tail theorems, numerical checks

struct LargeDevRow {
  int n = 0;
  double y = 0.0;
  double p_hat = 0.0;
  double ratio = 0.0;        // p_hat / (n T(y))
  double ratio_upper = 0.0;  // Wilson upper bound / (n T(y))
};

struct LargeDevReport {
  std::vector<LargeDevRow> rows;
  double max_upper_small = 0.0;  // over the two smallest n > 1
  double max_upper_large = 0.0;  // over the remaining n
  double slack = 3.0;
  bool bounded = false;          // max_upper_large <= slack * max_upper_small
};

/// Monte Carlo ratio P(eta_1 + ... + eta_n > y) / (n P(eta_1 > y)) at
/// y = gamma n m for each multiplier m >= 1. At n = 1 the ratio is exactly 1
/// and is reported without sampling. Replicate i of size n uses the stream
/// (seed, n, i), so results do not depend on `threads`.
[[nodiscard]] inline LargeDevReport large_dev_check(const DistSpec& spec_eta, double gamma,
                                                    std::vector<int> n_grid,
                                                    const std::vector<double>& multipliers,
                                                    std::size_t mc_count, std::uint64_t seed,
                                                    unsigned threads = 1, double slack = 3.0) {
  const DiscretePareto& d = detail::require_regularly_varying(spec_eta);
  if (!(d.alpha() > 1.0 && d.alpha() < 2.0)) {
    throw std::invalid_argument("large_dev_check needs alpha in (1, 2)");
  }
  const double m = mean(spec_eta).value();
  if (!(gamma > m)) throw std::invalid_argument("gamma must exceed the mean");
  if (multipliers.empty()) throw std::invalid_argument("multipliers must be non-empty");
  for (double mult : multipliers) {
    if (!(mult >= 1.0)) throw std::invalid_argument("y must be at least gamma * n");
  }
  if (mc_count < 1) throw std::invalid_argument("mc_count must be positive");
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  if (n_grid.empty() || n_grid.front() < 1) throw std::invalid_argument("n must be >= 1");

  LargeDevReport rep;
  rep.slack = slack;
  const RandomStream master(seed);
  std::vector<Count> sums(mc_count);
  int larger_seen = 0;
  for (int n : n_grid) {
    if (n == 1) {
      for (double mult : multipliers) {
        const double y = gamma * mult;
        rep.rows.push_back({1, y, d.tail(y), 1.0, 1.0});
      }
      continue;
    }
    parallel_for(mc_count, threads, [&](std::size_t i) {
      RandomStream rng = master.derive(static_cast<std::uint64_t>(n), i);
      Count s = 0;
      for (int j = 0; j < n; ++j) s = saturating_add(s, detail::sample_discrete_pareto(d, rng));
      sums[i] = s;
    });
    double max_upper = 0.0;
    for (double mult : multipliers) {
      const double y = gamma * n * mult;
      std::size_t hits = 0;
      for (Count s : sums) hits += static_cast<double>(s) > y;
      const double denom = n * d.tail(y);
      const auto [lo, hi] = stats::wilson_interval(hits, mc_count);
      (void)lo;
      const double p = static_cast<double>(hits) / static_cast<double>(mc_count);
      rep.rows.push_back({n, y, p, p / denom, hi / denom});
      max_upper = std::max(max_upper, hi / denom);
    }
    if (larger_seen < 2) {
      rep.max_upper_small = std::max(rep.max_upper_small, max_upper);
    } else {
      rep.max_upper_large = std::max(rep.max_upper_large, max_upper);
    }
    ++larger_seen;
  }
  rep.bounded = std::isfinite(rep.max_upper_large) && std::isfinite(rep.max_upper_small) &&
                rep.max_upper_large <= slack * rep.max_upper_small;
  return rep;
}

namespace detail {

/// Orders tails by heaviness: smaller index first, then larger log factor.
/// Returns >0 if a is heavier, <0 if b is heavier, 0 if equivalent up to scale.
inline int compare_heaviness(const DistSpec& a, const DistSpec& b) {
  const auto* da = std::get_if<DiscretePareto>(&a);
  const auto* db = std::get_if<DiscretePareto>(&b);
  if (da == nullptr && db == nullptr) return 0;
  if (db == nullptr) return 1;
  if (da == nullptr) return -1;
  if (da->alpha() != db->alpha()) return da->alpha() < db->alpha() ? 1 : -1;
  if (da->log_factor() != db->log_factor()) return da->log_factor() > db->log_factor() ? 1 : -1;
  return 0;
}

}  // namespace detail

struct ConvolutionReport {
  TailReport report;   // empirical_tail holds the exact tail of X1 + X2
  int reference = 1;   // which summand provides the reference tail
};

/// Exact tail of X1 + X2 against the heavier summand's tail at its quantiles.
/// P(X1 + X2 > x) = P(X1 > x) + sum_{j <= x} P(X1 = j) P(X2 > x - j), so no
/// truncation is needed; x beyond `max_support` is refused.
[[nodiscard]] inline ConvolutionReport convolution_check(const DistSpec& spec1,
                                                         const DistSpec& spec2,
                                                         std::vector<double> levels,
                                                         Count max_support = 100'000'000) {
  if (!std::holds_alternative<DiscretePareto>(spec1) &&
      !std::holds_alternative<DiscretePareto>(spec2)) {
    throw std::invalid_argument("convolution_check needs a regularly varying summand");
  }
  const int cmp = detail::compare_heaviness(spec1, spec2);
  ConvolutionReport out;
  out.reference = cmp >= 0 ? 1 : 2;
  const DistSpec& ref = out.reference == 1 ? spec1 : spec2;
  const DistSpec& other = out.reference == 1 ? spec2 : spec1;
  TailReport& r = out.report;
  r.levels = detail::checked_levels(std::move(levels));
  r.predicted_limit = 1.0;
  if (cmp == 0) {
    const auto& a = std::get<DiscretePareto>(ref);
    const auto& b = std::get<DiscretePareto>(other);
    r.predicted_limit = 1.0 + b.scale() / a.scale();
  }

  for (double level : r.levels) {
    const Count xq = quantile(ref, level);
    if (xq > max_support) throw std::runtime_error("convolution support cutoff exceeded");
    const double x = static_cast<double>(xq);
    long double tail = exact_tail(spec1, x);
    for (Count j = 0; j <= xq; ++j) {
      const double pj = pmf(spec1, j);
      if (pj == 0.0) continue;
      tail += static_cast<long double>(pj) * exact_tail(spec2, x - static_cast<double>(j));
    }
    const double t = std::min(1.0, static_cast<double>(tail));
    const double ref_tail = exact_tail(ref, x);
    r.x_grid.push_back(x);
    r.empirical_tail.push_back(t);
    r.reference_tail.push_back(ref_tail);
    r.ratio.push_back(ref_tail > 0.0 ? t / ref_tail : std::numeric_limits<double>::quiet_NaN());
    r.standard_errors.push_back(0.0);
    r.unreliable.push_back(false);
  }
  return out;
}

/// Monte Carlo tail of sum_{i <= tau} zeta_i against P(tau > x); the predicted
/// limit of the ratio is (E zeta)^beta. Replicate i uses stream (seed, i).
[[nodiscard]] inline TailReport random_sum_check(const DistSpec& tau, const DistSpec& zeta,
                                                 std::vector<double> levels,
                                                 std::size_t mc_count, std::uint64_t seed,
                                                 unsigned threads = 1) {
  const DiscretePareto& t = detail::require_regularly_varying(tau);
  const double beta = t.alpha();
  const ExtendedReal mz = mean(zeta);
  if (mz.is_infinite() || !(mz.value() > 0.0)) {
    throw std::invalid_argument("zeta needs a positive finite mean");
  }
  if (beta >= 1.0) {
    if (const auto* zp = std::get_if<DiscretePareto>(&zeta); zp != nullptr && zp->alpha() <= beta) {
      throw std::invalid_argument("zeta needs a finite moment of order above beta");
    }
  }
  if (mc_count < 1) throw std::invalid_argument("mc_count must be positive");

  const RandomStream master(seed);
  std::vector<Count> sums(mc_count);
  parallel_for(mc_count, threads, [&](std::size_t i) {
    RandomStream rng = master.derive(i);
    const Count n = detail::sample_discrete_pareto(t, rng);
    sums[i] = branch_sum(n, zeta, rng);
  });
  TailReport r = tail_ratio_curve(std::span<const Count>(sums), tau, std::move(levels));
  r.predicted_limit = std::pow(mz.value(), beta);
  return r;
}

}  // namespace gwi
