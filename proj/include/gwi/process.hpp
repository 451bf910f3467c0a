#pragma once

#include "gwi/dists.hpp"
#include "gwi/dists_json.hpp"
#include "gwi/random_stream.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gwi {

/// Offspring at age 1 (xi), offspring at age 2 (eta), immigration (eps) and
/// the laws of the initial sizes X_0 and X_{-1}.
struct ModelParams {
  DistSpec xi = Constant(0);
  DistSpec eta = Constant(0);
  DistSpec eps = Constant(0);
  DistSpec x0 = Constant(0);
  DistSpec xm1 = Constant(0);
};

[[nodiscard]] inline nlohmann::json to_json(const ModelParams& m) {
  return nlohmann::json{{"xi", to_json(m.xi)},
                        {"eta", to_json(m.eta)},
                        {"eps", to_json(m.eps)},
                        {"x0", to_json(m.x0)},
                        {"xm1", to_json(m.xm1)}};
}

[[nodiscard]] inline ModelParams model_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"xi", "eta", "eps", "x0", "xm1"}, "model");
  return ModelParams{dist_from_json(j["xi"]), dist_from_json(j["eta"]),
                     dist_from_json(j["eps"]), dist_from_json(j["x0"]),
                     dist_from_json(j["xm1"])};
}

[[nodiscard]] inline std::uint64_t params_hash(const ModelParams& m) {
  return fnv1a(to_json(m).dump());
}

/// Raised when a sampler is asked for something its construction does not
/// cover (e.g. stationary sampling outside the subcritical regime).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Random sums

/// Sum of `count` i.i.d. draws from `offspring`; 0 when count is 0.
///
/// Families closed under convolution are drawn in one shot (Bernoulli and
/// Binomial sums are Binomial, Poisson sums Poisson, Geometric sums negative
/// binomial, FinitePMF sums through a multinomial split of the count). Only
/// DiscretePareto offspring fall back to drawing one by one.
[[nodiscard]] inline Count branch_sum(Count count, const DistSpec& offspring, RandomStream& rng) {
  if (count == 0) return 0;
  return std::visit(
      overloaded{
          [&](const Constant& c) { return saturating_mul(count, c.value()); },
          [&](const Bernoulli& b) { return detail::draw_binomial(count, b.p(), rng); },
          [&](const Binomial& b) {
            return detail::draw_binomial(saturating_mul(count, b.trials()), b.p(), rng);
          },
          [&](const Poisson& p) {
            return detail::draw_poisson(static_cast<double>(count) * p.rate(), rng);
          },
          [&](const Geometric& g) -> Count {
            if (g.p() >= 1.0) return 0;
            std::negative_binomial_distribution<long long> dist(static_cast<long long>(count),
                                                                g.p());
            return std::min<Count>(static_cast<Count>(dist(rng)), kCountCap);
          },
          [&](const FinitePmf& f) {
            Count remaining = count;
            Count total = 0;
            double mass_left = 1.0;
            const auto& w = f.weights();
            for (std::size_t k = 0; k < w.size() && remaining > 0; ++k) {
              Count n_k;
              if (k + 1 == w.size() || mass_left <= w[k]) {
                n_k = remaining;
              } else {
                n_k = detail::draw_binomial(remaining, std::clamp(w[k] / mass_left, 0.0, 1.0),
                                            rng);
              }
              mass_left -= w[k];
              remaining -= n_k;
              total = saturating_add(total, saturating_mul(n_k, static_cast<Count>(k)));
            }
            return total;
          },
          [&](const DiscretePareto& d) {
            Count total = 0;
            for (Count i = 0; i < count && total < kCountCap; ++i) {
              total = saturating_add(total, detail::sample_discrete_pareto(d, rng));
            }
            return total;
          },
      },
      offspring);
}

// ---------------------------------------------------------------------------
// Path recursion

enum class StreamRole : std::uint64_t { kInitialX0 = 0, kInitialXm1 = 1, kXi = 2, kEta = 3, kEps = 4 };

/// The three streams consumed by one generation.
struct GenerationStreams {
  RandomStream xi;
  RandomStream eta;
  RandomStream eps;

  /// Streams of generation n >= 1 of path `path_index` under `seed`.
  static GenerationStreams for_path(std::uint64_t seed, std::uint64_t path_index, int n) {
    const RandomStream gen =
        RandomStream(seed).derive(path_index, static_cast<std::uint64_t>(n + 1));
    return {gen.derive(static_cast<std::uint64_t>(StreamRole::kXi)),
            gen.derive(static_cast<std::uint64_t>(StreamRole::kEta)),
            gen.derive(static_cast<std::uint64_t>(StreamRole::kEps))};
  }
};

[[nodiscard]] inline Count step(Count x_prev, Count x_prev2, const ModelParams& params,
                                GenerationStreams& streams) {
  const Count from_age1 = branch_sum(x_prev, params.xi, streams.xi);
  const Count from_age2 = branch_sum(x_prev2, params.eta, streams.eta);
  return saturating_add(saturating_add(from_age1, from_age2), sample(params.eps, streams.eps));
}

/// One generation driven by a single stream; the role streams are split off
/// a fresh key drawn from `rng`.
[[nodiscard]] inline Count step(Count x_prev, Count x_prev2, const ModelParams& params,
                                RandomStream& rng) {
  const RandomStream base(rng());
  GenerationStreams streams{base.derive(static_cast<std::uint64_t>(StreamRole::kXi)),
                            base.derive(static_cast<std::uint64_t>(StreamRole::kEta)),
                            base.derive(static_cast<std::uint64_t>(StreamRole::kEps))};
  return step(x_prev, x_prev2, params, streams);
}

/// Trajectory X_{-1}, X_0, ..., X_N.
struct Path {
  std::vector<Count> values;  // values[n + 1] = X_n
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::uint64_t params_hash = 0;

  [[nodiscard]] Count at(int n) const { return values.at(static_cast<std::size_t>(n + 1)); }
  [[nodiscard]] int horizon() const { return static_cast<int>(values.size()) - 2; }
};

namespace detail {

inline std::pair<Count, Count> initial_pair(const ModelParams& params, std::uint64_t seed,
                                            std::uint64_t path_index) {
  const RandomStream init = RandomStream(seed).derive(path_index, std::uint64_t{0});
  RandomStream r0 = init.derive(static_cast<std::uint64_t>(StreamRole::kInitialX0));
  RandomStream rm1 = init.derive(static_cast<std::uint64_t>(StreamRole::kInitialXm1));
  return {sample(params.x0, r0), sample(params.xm1, rm1)};
}

}  // namespace detail

/// Simulates the second-order recursion for n_steps generations. The result
/// is a pure function of (params, seed, path_index).
[[nodiscard]] inline Path simulate_path(const ModelParams& params, int n_steps,
                                        std::uint64_t seed, std::uint64_t path_index = 0) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  Path path;
  path.seed = seed;
  path.path_index = path_index;
  path.params_hash = params_hash(params);
  path.values.reserve(static_cast<std::size_t>(n_steps) + 2);
  const auto [x0, xm1] = detail::initial_pair(params, seed, path_index);
  path.values.push_back(xm1);
  path.values.push_back(x0);
  for (int n = 1; n <= n_steps; ++n) {
    auto streams = GenerationStreams::for_path(seed, path_index, n);
    const std::size_t i = path.values.size();
    path.values.push_back(step(path.values[i - 1], path.values[i - 2], params, streams));
  }
  return path;
}

/// X_N only, without storing the trajectory.
[[nodiscard]] inline Count simulate_endpoint(const ModelParams& params, int n_steps,
                                             std::uint64_t seed, std::uint64_t path_index) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  auto [cur, prev] = detail::initial_pair(params, seed, path_index);
  for (int n = 1; n <= n_steps; ++n) {
    auto streams = GenerationStreams::for_path(seed, path_index, n);
    const Count next = step(cur, prev, params, streams);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Y_n = (Y_{n,1}, Y_{n,2}) of the 2-type embedding.
struct TwoTypePath {
  std::vector<std::pair<Count, Count>> vectors;  // vectors[n] = Y_n, n = 0..N
};

/// 2-type process in which a type-1 individual begets xi type-1 individuals
/// and one type-2 individual, a type-2 individual begets eta type-1
/// individuals, and eps type-1 immigrants arrive each generation. Uses the
/// same generation streams as simulate_path, so the first coordinate
/// reproduces X_n and the second X_{n-1} pathwise.
[[nodiscard]] inline TwoTypePath simulate_two_type(const ModelParams& params, int n_steps,
                                                   std::uint64_t seed,
                                                   std::uint64_t path_index = 0) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  TwoTypePath out;
  out.vectors.reserve(static_cast<std::size_t>(n_steps) + 1);
  const auto [x0, xm1] = detail::initial_pair(params, seed, path_index);
  out.vectors.emplace_back(x0, xm1);
  for (int n = 1; n <= n_steps; ++n) {
    auto streams = GenerationStreams::for_path(seed, path_index, n);
    const auto [type1, type2] = out.vectors.back();
    Count first = branch_sum(type1, params.xi, streams.xi);
    first = saturating_add(first, branch_sum(type2, params.eta, streams.eta));
    first = saturating_add(first, sample(params.eps, streams.eps));
    const Count second = type1;  // each type-1 individual leaves exactly one type-2
    out.vectors.emplace_back(first, second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Branching building blocks

/// V_n of the process without immigration started from (V_0, V_{-1}) =
/// (v0, vm1), for n >= -1.
[[nodiscard]] inline Count sample_V(int n, Count v0, Count vm1, const ModelParams& params,
                                    RandomStream& rng) {
  if (n < -1) throw std::invalid_argument("sample_V needs n >= -1");
  if (n == -1) return vm1;
  Count cur = v0;
  Count prev = vm1;
  for (int g = 1; g <= n; ++g) {
    if (cur == 0 && prev == 0) return 0;
    const Count next =
        saturating_add(branch_sum(cur, params.xi, rng), branch_sum(prev, params.eta, rng));
    prev = cur;
    cur = next;
  }
  return cur;
}

enum class AdditiveForm { kPure, kWithImmigration };

/// X_n through the additive representation: independent descendant counts of
/// each initial individual (copies of V_{n,0} and V_{n,-1}) and, with
/// immigration, of each generation's immigrants (V^{(n-i)}(eps_i, 0)).
/// The cost is linear in X_0 + X_{-1}.
[[nodiscard]] inline Count sample_additive(int n, const ModelParams& params, RandomStream& rng,
                                           AdditiveForm form = AdditiveForm::kPure) {
  if (n < 1) throw std::invalid_argument("sample_additive needs n >= 1");
  if (form == AdditiveForm::kPure && !is_zero(params.eps)) {
    throw PreconditionError("pure additive form requires eps = Constant(0)");
  }
  constexpr Count kMaxAncestors = 100'000'000;
  const Count x0 = sample(params.x0, rng);
  const Count xm1 = sample(params.xm1, rng);
  if (x0 > kMaxAncestors || xm1 > kMaxAncestors) {
    throw std::length_error("additive representation: initial population too large");
  }
  Count total = 0;
  for (Count i = 0; i < x0; ++i) total = saturating_add(total, sample_V(n, 1, 0, params, rng));
  for (Count j = 0; j < xm1; ++j) total = saturating_add(total, sample_V(n, 0, 1, params, rng));
  if (form == AdditiveForm::kWithImmigration) {
    for (int i = 1; i <= n; ++i) {
      const Count e = sample(params.eps, rng);
      total = saturating_add(total, sample_V(n - i, e, 0, params, rng));
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Stationary law

struct StationaryDraw {
  Count value = 0;
  int terms_used = 0;  // N: the series was summed over i = 0..N
};

/// Mean matrix spectral radius rho = (m_xi + sqrt(m_xi^2 + 4 m_eta)) / 2.
[[nodiscard]] inline double spectral_radius(double m_xi, double m_eta) {
  return 0.5 * (m_xi + std::sqrt(m_xi * m_xi + 4.0 * m_eta));
}

/// Number of terms N = ceil(log(tol) / log(rho)), so that rho^N <= tol.
[[nodiscard]] inline int stationary_truncation(double rho, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("truncation needs rho in (0, 1)");
  return static_cast<int>(std::ceil(std::log(tol) / std::log(rho)));
}

namespace detail {

inline double checked_stationary_rho(const ModelParams& params) {
  const ExtendedReal m_xi = mean(params.xi);
  const ExtendedReal m_eta = mean(params.eta);
  if (m_xi.is_infinite() || m_eta.is_infinite()) {
    throw PreconditionError("stationary sampling needs finite offspring means");
  }
  const double a = m_xi.value();
  const double b = m_eta.value();
  if (!(a > 0.0) || !(a + b < 1.0)) {
    throw PreconditionError(
        "stationary sampling needs m_xi > 0, m_eta >= 0 and m_xi + m_eta < 1 "
        "(not subcritical/positive-means)");
  }
  return spectral_radius(a, b);
}

}  // namespace detail

/// Truncated series sum_{i=0}^{N} V_i^{(i)}(eps_i) for the stationary
/// marginal. Term i is driven by rng.derive(i), so a smaller tol only appends
/// terms and the draw grows monotonically.
[[nodiscard]] inline StationaryDraw sample_stationary(const ModelParams& params, double tol,
                                                      const RandomStream& rng) {
  const double rho = detail::checked_stationary_rho(params);
  const int n_terms = stationary_truncation(rho, tol);
  StationaryDraw draw;
  draw.terms_used = n_terms;
  for (int i = 0; i <= n_terms; ++i) {
    RandomStream term = rng.derive(static_cast<std::uint64_t>(i));
    const Count e = sample(params.eps, term);
    draw.value = saturating_add(draw.value, sample_V(i, e, 0, params, term));
  }
  return draw;
}

}  // namespace gwi
