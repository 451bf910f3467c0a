// Independent reference computations for the test suite. Nothing here calls
// into the library's closed forms.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

/// m_k from m_k = m_xi m_{k-1} + m_eta m_{k-2}, m_0 = 1, m_{-1} = 0.
inline std::vector<double> m_recursion(double m_xi, double m_eta, int k_max) {
  std::vector<double> m(static_cast<std::size_t>(k_max) + 1);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    m[static_cast<std::size_t>(k)] = cur;
    const double next = m_xi * cur + m_eta * prev;
    prev = cur;
    cur = next;
  }
  return m;
}

using Mat = std::array<std::array<double, 2>, 2>;

inline Mat multiply(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat naive_power(double m_xi, double m_eta, int n) {
  Mat r{{{1.0, 0.0}, {0.0, 1.0}}};
  const Mat m{{{m_xi, m_eta}, {1.0, 0.0}}};
  for (int i = 0; i < n; ++i) r = multiply(r, m);
  return r;
}

/// E X_n from E X_n = m_xi E X_{n-1} + m_eta E X_{n-2} + m_eps.
inline double expectation_recursion(double m_xi, double m_eta, double m_eps, double ex0,
                                    double exm1, int n) {
  double prev = exm1;
  double cur = ex0;
  for (int k = 1; k <= n; ++k) {
    const double next = m_xi * cur + m_eta * prev + m_eps;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double choose(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline double binom_pmf(int n, double p, int k) {
  if (k < 0 || k > n) return 0.0;
  return choose(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

/// Exact law of X_n for Bernoulli(p) age-1 and Bernoulli(q) age-2 offspring,
/// no immigration, started from (X_0, X_{-1}) = (1, 0). Enumerates the joint
/// law of (X_k, X_{k-1}) generation by generation.
inline std::map<int, double> bernoulli_law(double p, double q, int n) {
  std::map<std::pair<int, int>, double> joint{{{1, 0}, 1.0}};
  for (int g = 1; g <= n; ++g) {
    std::map<std::pair<int, int>, double> next;
    for (const auto& [state, w] : joint) {
      const auto [cur, prev] = state;
      for (int a = 0; a <= cur; ++a) {
        const double pa = binom_pmf(cur, p, a);
        for (int b = 0; b <= prev; ++b) {
          next[{a + b, cur}] += w * pa * binom_pmf(prev, q, b);
        }
      }
    }
    joint = std::move(next);
  }
  std::map<int, double> law;
  for (const auto& [state, w] : joint) law[state.first] += w;
  return law;
}

inline double law_moment(const std::map<int, double>& law, int r) {
  double s = 0.0;
  for (const auto& [k, w] : law) s += w * std::pow(k, r);
  return s;
}

/// sum_{k=0}^{K-1} (1+k)^-a.
inline long double power_partial_sum(double a, long long K) {
  long double s = 0.0L;
  for (long long k = K; k-- > 0;) s += std::pow(static_cast<long double>(1 + k), -a);
  return s;
}

}  // namespace oracle
