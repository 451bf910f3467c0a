#pragma once

#include "gwi/process.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace gwi {

/// Exact laws by enumeration, for models whose offspring, immigration and
/// initial laws all have finite support. Used as the brute-force reference
/// for the additive representation and for second moments.
namespace exact {

using Pmf = std::vector<double>;  // Pmf[k] = P(X = k)

[[nodiscard]] inline Pmf to_pmf(const DistSpec& spec) {
  const auto top = support_max(spec);
  if (!top) throw std::invalid_argument("exact law needs finite-support distributions");
  Pmf out(*top + 1);
  for (Count k = 0; k <= *top; ++k) out[k] = pmf(spec, k);
  return out;
}

[[nodiscard]] inline Pmf convolve(const Pmf& a, const Pmf& b) {
  Pmf out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

/// Law of the sum of `count` independent copies.
class ConvolutionPowers {
public:
  explicit ConvolutionPowers(Pmf base) : powers_{Pmf{1.0}, std::move(base)} {}

  const Pmf& operator()(std::size_t count) {
    while (powers_.size() <= count) powers_.push_back(convolve(powers_.back(), powers_[1]));
    return powers_[count];
  }

private:
  std::vector<Pmf> powers_;
};

inline void accumulate(Pmf& into, const Pmf& add, double weight) {
  if (into.size() < add.size()) into.resize(add.size(), 0.0);
  for (std::size_t k = 0; k < add.size(); ++k) into[k] += weight * add[k];
}

/// Law of X_n obtained by pushing the joint law of (X_k, X_{k-1}) through the
/// recursion, immigration included.
[[nodiscard]] inline Pmf recursion_pmf(const ModelParams& params, int n) {
  if (n < -1) throw std::invalid_argument("recursion_pmf needs n >= -1");
  const Pmf p0 = to_pmf(params.x0);
  const Pmf pm1 = to_pmf(params.xm1);
  if (n == -1) return pm1;
  if (n == 0) return p0;
  ConvolutionPowers xi(to_pmf(params.xi));
  ConvolutionPowers eta(to_pmf(params.eta));
  const Pmf eps = to_pmf(params.eps);

  std::map<std::pair<std::size_t, std::size_t>, double> joint;  // (X_k, X_{k-1})
  for (std::size_t a = 0; a < p0.size(); ++a) {
    for (std::size_t b = 0; b < pm1.size(); ++b) {
      if (p0[a] * pm1[b] > 0.0) joint[{a, b}] += p0[a] * pm1[b];
    }
  }
  for (int g = 1; g <= n; ++g) {
    std::map<std::pair<std::size_t, std::size_t>, double> next;
    for (const auto& [state, w] : joint) {
      const auto [a, b] = state;
      const Pmf law = convolve(convolve(xi(a), eta(b)), eps);
      for (std::size_t x = 0; x < law.size(); ++x) {
        if (law[x] > 0.0) next[{x, a}] += w * law[x];
      }
    }
    joint = std::move(next);
  }
  Pmf out;
  for (const auto& [state, w] : joint) {
    if (out.size() <= state.first) out.resize(state.first + 1, 0.0);
    out[state.first] += w;
  }
  return out;
}

/// Law of X_n from the additive representation: each initial individual
/// contributes an independent copy of V_{n,0} or V_{n,-1}, and with
/// immigration each eps_i contributes V^{(n-i)}(eps_i, 0).
[[nodiscard]] inline Pmf additive_pmf(const ModelParams& params, int n, bool with_immigration) {
  if (n < 1) throw std::invalid_argument("additive_pmf needs n >= 1");
  ModelParams single = params;
  single.eps = Constant(0);
  auto founder_law = [&](Count v0, Count vm1, int steps) {
    single.x0 = Constant(v0);
    single.xm1 = Constant(vm1);
    return recursion_pmf(single, steps);
  };
  ConvolutionPowers zeta0(founder_law(1, 0, n));
  ConvolutionPowers zetam1(founder_law(0, 1, n));

  const Pmf p0 = to_pmf(params.x0);
  const Pmf pm1 = to_pmf(params.xm1);
  Pmf out;
  for (std::size_t a = 0; a < p0.size(); ++a) {
    for (std::size_t b = 0; b < pm1.size(); ++b) {
      const double w = p0[a] * pm1[b];
      if (w > 0.0) accumulate(out, convolve(zeta0(a), zetam1(b)), w);
    }
  }
  if (with_immigration) {
    const Pmf eps = to_pmf(params.eps);
    for (int i = 1; i <= n; ++i) {
      ConvolutionPowers v(founder_law(1, 0, n - i));
      Pmf contribution;
      for (std::size_t e = 0; e < eps.size(); ++e) {
        if (eps[e] > 0.0) accumulate(contribution, v(e), eps[e]);
      }
      out = convolve(out, contribution);
    }
  }
  return out;
}

[[nodiscard]] inline double moment(const Pmf& p, int r) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < p.size(); ++k) {
    s += static_cast<long double>(p[k]) * std::pow(static_cast<long double>(k), r);
  }
  return static_cast<double>(s);
}

}  // namespace exact

}  // namespace gwi
