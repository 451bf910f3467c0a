#pragma once

#include "gwi/detail/series.hpp"
#include "gwi/extended_real.hpp"
#include "gwi/random_stream.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gwi {

/// Population counts. Every sampler saturates at kCountCap so that sums of
/// a few dozen counts never overflow; reaching the cap requires a uniform
/// draw below roughly 2^-49 for the heaviest tails used here.
using Count = std::uint64_t;
inline constexpr Count kCountCap = Count{1} << 62;

constexpr Count saturating_add(Count a, Count b) noexcept {
  return (a >= kCountCap || b >= kCountCap - a) ? kCountCap : a + b;
}

constexpr Count saturating_mul(Count a, Count b) noexcept {
  if (a == 0 || b == 0) return 0;
  return a > kCountCap / b ? kCountCap : std::min(a * b, kCountCap);
}

namespace detail {

inline double check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distribution families

class Constant {
public:
  explicit Constant(Count value) : value_(value) {
    if (value > kCountCap) throw std::invalid_argument("Constant value exceeds count cap");
  }
  [[nodiscard]] Count value() const { return value_; }
  friend bool operator==(const Constant&, const Constant&) = default;

private:
  Count value_;
};

class Bernoulli {
public:
  explicit Bernoulli(double p) : p_(detail::check_probability(p, "Bernoulli p")) {}
  [[nodiscard]] double p() const { return p_; }
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;

private:
  double p_;
};

class Binomial {
public:
  Binomial(Count trials, double p)
      : trials_(trials), p_(detail::check_probability(p, "Binomial p")) {
    if (trials == 0) throw std::invalid_argument("Binomial n must be positive");
    if (trials > kCountCap) throw std::invalid_argument("Binomial n exceeds count cap");
  }
  [[nodiscard]] Count trials() const { return trials_; }
  [[nodiscard]] double p() const { return p_; }
  friend bool operator==(const Binomial&, const Binomial&) = default;

private:
  Count trials_;
  double p_;
};

class Poisson {
public:
  explicit Poisson(double rate) : rate_(rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("Poisson rate must be finite and non-negative");
    }
  }
  [[nodiscard]] double rate() const { return rate_; }
  friend bool operator==(const Poisson&, const Poisson&) = default;

private:
  double rate_;
};

/// Number of failures before the first success; support {0, 1, 2, ...}.
class Geometric {
public:
  explicit Geometric(double p) : p_(p) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("Geometric p must lie in (0, 1]");
    }
  }
  [[nodiscard]] double p() const { return p_; }
  friend bool operator==(const Geometric&, const Geometric&) = default;

private:
  double p_;
};

/// Explicit weights on {0, ..., K}.
class FinitePmf {
public:
  explicit FinitePmf(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("FinitePMF needs at least one weight");
    long double total = 0.0L;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("FinitePMF weights must be finite and non-negative");
      }
      total += w;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
      throw std::invalid_argument("FinitePMF weights must sum to 1 within 1e-12");
    }
    // suffix_[k] = sum_{j >= k} w_j; suffix_[K+1] = 0.
    suffix_.assign(weights_.size() + 1, 0.0);
    long double acc = 0.0L;
    for (std::size_t k = weights_.size(); k-- > 0;) {
      acc += weights_[k];
      suffix_[k] = static_cast<double>(acc);
    }
    cumulative_.resize(weights_.size());
    acc = 0.0L;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      acc += weights_[k];
      cumulative_[k] = static_cast<double>(acc);
    }
  }

  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] Count max_value() const { return weights_.size() - 1; }
  /// P(X > k) for k >= 0.
  [[nodiscard]] double tail_at(Count k) const {
    return k + 1 < suffix_.size() ? suffix_[k + 1] : 0.0;
  }
  [[nodiscard]] const std::vector<double>& cumulative() const { return cumulative_; }

  friend bool operator==(const FinitePmf& a, const FinitePmf& b) {
    return a.weights_ == b.weights_;
  }

private:
  std::vector<double> weights_;
  std::vector<double> suffix_;
  std::vector<double> cumulative_;
};

/// Regularly varying law on the non-negative integers with tail
///   T(k) = C (1+k)^-alpha (1 + log(1+k))^beta,   k >= k*,
///   T(k) = 1,                                    0 <= k < k*,
/// where k* is the maximiser of the unscaled tail and C = min(1, 1/max).
/// For beta <= alpha the unscaled tail is already decreasing from k = 0, so
/// k* = 0 and C = 1; otherwise the plateau clips the initial rise.
class DiscretePareto {
public:
  explicit DiscretePareto(double alpha, double log_factor = 0.0)
      : alpha_(alpha), beta_(log_factor) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("DiscretePareto alpha must be positive and finite");
    }
    if (!std::isfinite(log_factor)) {
      throw std::invalid_argument("DiscretePareto log_factor must be finite");
    }
    if (beta_ > alpha_) {
      // d log T / d log t = -alpha + beta / (1 + log t) vanishes at t*.
      const double t_star = std::exp(beta_ / alpha_ - 1.0);
      const double k_lo = std::max(0.0, std::floor(t_star - 1.0));
      double best_k = 0.0;
      double best = raw_log_tail(0.0);
      for (double k : {k_lo, k_lo + 1.0}) {
        if (raw_log_tail(k) > best) {
          best = raw_log_tail(k);
          best_k = k;
        }
      }
      plateau_ = static_cast<Count>(best_k);
      log_scale_ = std::min(0.0, -best);
    }
  }

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double log_factor() const { return beta_; }
  [[nodiscard]] double scale() const { return std::exp(log_scale_); }
  /// First index where the closed-form tail applies; T(k) = 1 below it.
  [[nodiscard]] Count plateau() const { return plateau_; }

  /// log T(t) of the closed form, for real t >= plateau().
  [[nodiscard]] double smooth_log_tail(double t) const {
    return log_scale_ + raw_log_tail(t);
  }

  /// smooth_log_tail(t) as slope * log t + rest; usable where t overflows.
  [[nodiscard]] detail::LogTerm smooth_log_tail_parts(double t, double ell) const {
    if (t == 0.0) return {0.0, log_scale_};
    // log(1 + t) = ell + log1p(1/t), kept finite for large and small t.
    const double excess = ell > 0.0 ? std::log1p(std::exp(-ell)) : std::log1p(1.0 / t);
    double rest = log_scale_ - alpha_ * excess;
    if (beta_ != 0.0) rest += beta_ * std::log1p(ell + excess);
    return {-alpha_, rest};
  }

  /// log P(X > x) for real x.
  [[nodiscard]] double log_tail(double x) const {
    if (x < 0.0) return 0.0;
    const double k = std::floor(x);
    if (k < static_cast<double>(plateau_)) return 0.0;
    return std::min(0.0, smooth_log_tail(k));
  }

  [[nodiscard]] double tail(double x) const { return std::exp(log_tail(x)); }

  friend bool operator==(const DiscretePareto& a, const DiscretePareto& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

private:
  [[nodiscard]] double raw_log_tail(double t) const {
    const double l = std::log1p(t);
    double v = -alpha_ * l;
    if (beta_ != 0.0) v += beta_ * std::log1p(l);
    return v;
  }

  double alpha_;
  double beta_;
  double log_scale_ = 0.0;
  Count plateau_ = 0;
};

using DistSpec =
    std::variant<Constant, Bernoulli, Binomial, Poisson, Geometric, FinitePmf, DiscretePareto>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[nodiscard]] inline std::string kind_name(const DistSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant&) { return "constant"; },
                        [](const Bernoulli&) { return "bernoulli"; },
                        [](const Binomial&) { return "binomial"; },
                        [](const Poisson&) { return "poisson"; },
                        [](const Geometric&) { return "geometric"; },
                        [](const FinitePmf&) { return "finite_pmf"; },
                        [](const DiscretePareto&) { return "discrete_pareto"; },
                    },
                    spec);
}

[[nodiscard]] inline bool is_zero(const DistSpec& spec) {
  if (const auto* c = std::get_if<Constant>(&spec)) return c->value() == 0;
  if (const auto* b = std::get_if<Bernoulli>(&spec)) return b->p() == 0.0;
  if (const auto* b = std::get_if<Binomial>(&spec)) return b->p() == 0.0;
  if (const auto* p = std::get_if<Poisson>(&spec)) return p->rate() == 0.0;
  if (const auto* g = std::get_if<Geometric>(&spec)) return g->p() == 1.0;
  if (const auto* f = std::get_if<FinitePmf>(&spec)) return f->weights()[0] == 1.0;
  return false;
}

/// Tail index when the law is regularly varying (only DiscretePareto here).
[[nodiscard]] inline std::optional<double> tail_index(const DistSpec& spec) {
  if (const auto* d = std::get_if<DiscretePareto>(&spec)) return d->alpha();
  return std::nullopt;
}

/// Largest value in the support, when the support is finite.
[[nodiscard]] inline std::optional<Count> support_max(const DistSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant& c) -> std::optional<Count> { return c.value(); },
                        [](const Bernoulli& b) -> std::optional<Count> {
                          return b.p() > 0.0 ? 1 : 0;
                        },
                        [](const Binomial& b) -> std::optional<Count> {
                          return b.p() > 0.0 ? b.trials() : 0;
                        },
                        [](const Poisson& p) -> std::optional<Count> {
                          if (p.rate() == 0.0) return Count{0};
                          return std::nullopt;
                        },
                        [](const Geometric& g) -> std::optional<Count> {
                          if (g.p() == 1.0) return Count{0};
                          return std::nullopt;
                        },
                        [](const FinitePmf& f) -> std::optional<Count> {
                          return f.max_value();
                        },
                        [](const DiscretePareto&) -> std::optional<Count> {
                          return std::nullopt;
                        },
                    },
                    spec);
}

// ---------------------------------------------------------------------------
// Exact tail and pmf

/// P(X > x).
[[nodiscard]] inline double exact_tail(const DistSpec& spec, double x) {
  if (x < 0.0) return 1.0;
  const double k = std::floor(x);
  return std::visit(
      overloaded{
          [&](const Constant& c) { return x < static_cast<double>(c.value()) ? 1.0 : 0.0; },
          [&](const Bernoulli& b) { return x < 1.0 ? b.p() : 0.0; },
          [&](const Binomial& b) {
            const double n = static_cast<double>(b.trials());
            if (k >= n || b.p() == 0.0) return 0.0;
            if (b.p() == 1.0) return 1.0;
            return boost::math::ibeta(k + 1.0, n - k, b.p());
          },
          [&](const Poisson& p) {
            if (p.rate() == 0.0) return 0.0;
            return boost::math::gamma_p(k + 1.0, p.rate());
          },
          [&](const Geometric& g) {
            if (g.p() == 1.0) return 0.0;
            return std::exp((k + 1.0) * std::log1p(-g.p()));
          },
          [&](const FinitePmf& f) {
            if (k >= static_cast<double>(f.max_value())) return 0.0;
            return f.tail_at(static_cast<Count>(k));
          },
          [&](const DiscretePareto& d) { return d.tail(x); },
      },
      spec);
}

/// P(X = k).
[[nodiscard]] inline double pmf(const DistSpec& spec, Count k) {
  const double kd = static_cast<double>(k);
  return std::visit(
      overloaded{
          [&](const Constant& c) { return k == c.value() ? 1.0 : 0.0; },
          [&](const Bernoulli& b) {
            if (k == 0) return 1.0 - b.p();
            return k == 1 ? b.p() : 0.0;
          },
          [&](const Binomial& b) {
            if (k > b.trials()) return 0.0;
            if (b.p() == 0.0) return k == 0 ? 1.0 : 0.0;
            if (b.p() == 1.0) return k == b.trials() ? 1.0 : 0.0;
            return boost::math::pdf(
                boost::math::binomial_distribution<double>(static_cast<double>(b.trials()), b.p()),
                kd);
          },
          [&](const Poisson& p) {
            if (p.rate() == 0.0) return k == 0 ? 1.0 : 0.0;
            return boost::math::pdf(boost::math::poisson_distribution<double>(p.rate()), kd);
          },
          [&](const Geometric& g) {
            if (g.p() == 1.0) return k == 0 ? 1.0 : 0.0;
            return g.p() * std::exp(kd * std::log1p(-g.p()));
          },
          [&](const FinitePmf& f) { return k <= f.max_value() ? f.weights()[k] : 0.0; },
          [&](const DiscretePareto& d) {
            const double lo = k == 0 ? 0.0 : d.log_tail(kd - 1.0);
            const double hi = d.log_tail(kd);
            // T(k-1) - T(k) without cancellation.
            return -std::exp(lo) * std::expm1(hi - lo);
          },
      },
      spec);
}

/// Smallest integer x >= 0 with P(X > x) <= level.
[[nodiscard]] inline Count quantile(const DistSpec& spec, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("quantile level must lie in (0, 1)");
  }
  if (exact_tail(spec, 0.0) <= level) return 0;
  Count lo = 0;  // tail(lo) > level
  Count hi = 1;
  while (exact_tail(spec, static_cast<double>(hi)) > level) {
    lo = hi;
    if (hi >= kCountCap) throw std::runtime_error("quantile beyond count cap");
    hi = std::min(kCountCap, hi * 2);
  }
  while (hi - lo > 1) {
    const Count mid = lo + (hi - lo) / 2;
    if (exact_tail(spec, static_cast<double>(mid)) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline Count draw_binomial(Count trials, double p, RandomStream& rng) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<long long> dist(static_cast<long long>(trials), p);
  return static_cast<Count>(dist(rng));
}

inline Count draw_poisson(double mean, RandomStream& rng) {
  if (mean <= 0.0) return 0;
  if (mean >= static_cast<double>(kCountCap)) return kCountCap;
  std::poisson_distribution<long long> dist(mean);
  return std::min<Count>(static_cast<Count>(dist(rng)), kCountCap);
}

inline Count sample_discrete_pareto(const DiscretePareto& d, RandomStream& rng) {
  const double log_u = std::log(rng.uniform());
  // Smallest k with log T(k) < log U.
  auto below = [&](Count k) { return d.log_tail(static_cast<double>(k)) < log_u; };
  if (!below(kCountCap)) return kCountCap;

  // Initial guess from the pure power law, then bracket and bisect.
  const double guess = std::exp(-log_u / d.alpha());
  Count hi = guess >= static_cast<double>(kCountCap)
                 ? kCountCap
                 : std::max<Count>(static_cast<Count>(guess), d.plateau());
  Count lo = hi;
  Count step = 1;
  if (below(hi)) {
    if (below(0)) return 0;
    do {
      hi = lo;
      lo = lo > step ? lo - step : 0;
      step *= 2;
    } while (below(lo));
  } else {
    do {
      lo = hi;
      hi = hi > kCountCap - step ? kCountCap : hi + step;
      step *= 2;
    } while (!below(hi));
  }
  // Invariant: !below(lo), below(hi).
  while (hi - lo > 1) {
    const Count mid = lo + (hi - lo) / 2;
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

/// One draw from `spec`.
[[nodiscard]] inline Count sample(const DistSpec& spec, RandomStream& rng) {
  return std::visit(
      overloaded{
          [&](const Constant& c) { return c.value(); },
          [&](const Bernoulli& b) -> Count {
            if (b.p() <= 0.0) return 0;
            return rng.uniform() <= b.p() ? 1 : 0;
          },
          [&](const Binomial& b) { return detail::draw_binomial(b.trials(), b.p(), rng); },
          [&](const Poisson& p) { return detail::draw_poisson(p.rate(), rng); },
          [&](const Geometric& g) -> Count {
            if (g.p() >= 1.0) return 0;
            std::geometric_distribution<long long> dist(g.p());
            return std::min<Count>(static_cast<Count>(dist(rng)), kCountCap);
          },
          [&](const FinitePmf& f) -> Count {
            const double u = rng.uniform() * f.cumulative().back();
            const auto& cum = f.cumulative();
            auto it = std::lower_bound(cum.begin(), cum.end(), u);
            auto k = static_cast<Count>(it - cum.begin());
            k = std::min<Count>(k, f.max_value());
            while (f.weights()[k] == 0.0 && k > 0) --k;  // never land on a null atom
            return k;
          },
          [&](const DiscretePareto& d) { return detail::sample_discrete_pareto(d, rng); },
      },
      spec);
}

// ---------------------------------------------------------------------------
// Moments

namespace detail {

/// E h(X) for light-tailed laws by direct pmf summation.
template <class H>
double light_expectation(const DistSpec& spec, H&& h, double center) {
  long double sum = 0.0L;
  constexpr Count kMaxTerms = 200'000'000;
  for (Count k = 0; k < kMaxTerms; ++k) {
    const double p = pmf(spec, k);
    sum += static_cast<long double>(p) * h(static_cast<double>(k));
    if (static_cast<double>(k) > center) {
      const double t = exact_tail(spec, static_cast<double>(k));
      if (t == 0.0) break;
      if (t < 1e-18 && t * h(static_cast<double>(2 * k + 2)) < 1e-17 * static_cast<double>(sum)) {
        break;
      }
    }
  }
  return static_cast<double>(sum);
}

/// E h(X) = sum_k (h(k+1) - h(k)) T(k) for h(0) = 0, where `log_dh(t)` is
/// the log of the smooth continuation of h(t+1) - h(t). Working in logs keeps
/// the quadrature finite where the increment alone would overflow.
template <class LogDH>
SeriesSum pareto_expectation(const DiscretePareto& d, LogDH&& log_dh) {
  const auto plateau = static_cast<double>(d.plateau());
  auto log_term = [&](double t, double ell) {
    const LogTerm a = log_dh(t, ell);
    if (t < plateau) return a;
    const LogTerm b = d.smooth_log_tail_parts(t, ell);
    return LogTerm{a.slope + b.slope, a.rest + b.rest};
  };
  return sum_series(log_term, 0, d.plateau());
}

/// Classifies E X^r for DiscretePareto: finite iff r < alpha, or r == alpha
/// with beta < -1.
inline bool pareto_moment_finite(const DiscretePareto& d, double r) {
  if (r < d.alpha()) return true;
  if (r > d.alpha()) return false;
  return d.log_factor() < -1.0;
}

}  // namespace detail

/// E X^r, r > 0.
[[nodiscard]] inline ExtendedReal moment(const DistSpec& spec, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("moment order must be positive");
  auto power = [r](double k) { return k == 0.0 ? 0.0 : std::pow(k, r); };
  return std::visit(
      overloaded{
          [&](const Constant& c) {
            return ExtendedReal::finite(power(static_cast<double>(c.value())));
          },
          [&](const Bernoulli& b) { return ExtendedReal::finite(b.p()); },
          [&](const Binomial& b) {
            const double m = static_cast<double>(b.trials()) * b.p();
            if (r == 1.0) return ExtendedReal::finite(m);
            if (r == 2.0) return ExtendedReal::finite(m * (1.0 - b.p()) + m * m);
            return ExtendedReal::finite(detail::light_expectation(spec, power, m));
          },
          [&](const Poisson& p) {
            const double m = p.rate();
            if (r == 1.0) return ExtendedReal::finite(m);
            if (r == 2.0) return ExtendedReal::finite(m + m * m);
            return ExtendedReal::finite(detail::light_expectation(spec, power, m));
          },
          [&](const Geometric& g) {
            const double q = 1.0 - g.p();
            const double m = q / g.p();
            if (r == 1.0) return ExtendedReal::finite(m);
            if (r == 2.0) return ExtendedReal::finite(q / (g.p() * g.p()) + m * m);
            return ExtendedReal::finite(detail::light_expectation(spec, power, m));
          },
          [&](const FinitePmf& f) {
            long double s = 0.0L;
            for (std::size_t k = 0; k < f.weights().size(); ++k) {
              s += static_cast<long double>(f.weights()[k]) * power(static_cast<double>(k));
            }
            return ExtendedReal::finite(static_cast<double>(s));
          },
          [&](const DiscretePareto& d) {
            if (!detail::pareto_moment_finite(d, r)) return ExtendedReal::infinity();
            auto log_dh = [r](double t, double ell) {
              // log((t+1)^r - t^r), stable for large t.
              if (t == 0.0) return detail::LogTerm{0.0, 0.0};
              if (ell > 30.0) return detail::LogTerm{r - 1.0, std::log(r)};
              return detail::LogTerm{r, std::log(std::expm1(r * std::log1p(1.0 / t)))};
            };
            return ExtendedReal::finite(detail::pareto_expectation(d, log_dh).value);
          },
      },
      spec);
}

[[nodiscard]] inline ExtendedReal mean(const DistSpec& spec) { return moment(spec, 1.0); }

[[nodiscard]] inline ExtendedReal variance(const DistSpec& spec) {
  const ExtendedReal second = moment(spec, 2.0);
  if (second.is_infinite()) return ExtendedReal::infinity();
  const double m = mean(spec).value();
  return ExtendedReal::finite(std::max(0.0, second.value() - m * m));
}

/// E(1{X != 0} log X). Finite for every law here, including every
/// DiscretePareto.
[[nodiscard]] inline ExtendedReal log_moment(const DistSpec& spec) {
  auto logk = [](double k) { return k <= 1.0 ? 0.0 : std::log(k); };
  return std::visit(
      overloaded{
          [&](const Constant& c) {
            return ExtendedReal::finite(logk(static_cast<double>(c.value())));
          },
          [&](const Bernoulli&) { return ExtendedReal::finite(0.0); },
          [&](const FinitePmf& f) {
            long double s = 0.0L;
            for (std::size_t k = 2; k < f.weights().size(); ++k) {
              s += static_cast<long double>(f.weights()[k]) * std::log(static_cast<double>(k));
            }
            return ExtendedReal::finite(static_cast<double>(s));
          },
          [&](const DiscretePareto& d) {
            auto log_dh = [](double t, double ell) {
              if (t < 1.0) return detail::LogTerm{0.0, -HUGE_VAL};
              if (ell > 30.0) return detail::LogTerm{-1.0, 0.0};
              return detail::LogTerm{0.0, std::log(std::log1p(1.0 / t))};
            };
            return ExtendedReal::finite(detail::pareto_expectation(d, log_dh).value);
          },
          [&](const auto&) {
            return ExtendedReal::finite(
                detail::light_expectation(spec, logk, mean(spec).value()));
          },
      },
      spec);
}

}  // namespace gwi
