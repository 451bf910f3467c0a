#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gwi::stats {

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

template <class Range, class Map>
[[nodiscard]] MeanEstimate mean_se(const Range& values, Map&& map) {
  long double sum = 0.0L;
  long double sq = 0.0L;
  std::size_t n = 0;
  for (const auto& v : values) {
    const long double x = map(v);
    sum += x;
    sq += x * x;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("mean_se needs at least two values");
  const long double m = sum / n;
  const long double var = (sq - n * m * m) / (n - 1);
  return {static_cast<double>(m), static_cast<double>(std::sqrt(std::max(0.0L, var) / n))};
}

template <class Range>
[[nodiscard]] MeanEstimate mean_se(const Range& values) {
  return mean_se(values, [](const auto& v) { return static_cast<long double>(v); });
}

/// Wilson score interval for a binomial proportion.
[[nodiscard]] inline std::pair<double, double> wilson_interval(std::size_t successes,
                                                               std::size_t trials,
                                                               double z = 1.96) {
  if (trials == 0) throw std::invalid_argument("wilson_interval needs trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit. Adjacent cells are pooled left to right until each
/// expected count reaches min_expected; a short last group joins its neighbour.
[[nodiscard]] inline ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                                                    const std::vector<double>& expected,
                                                    double min_expected = 5.0) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof needs matching non-empty cells");
  }
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= min_expected) {
      cells.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(o, e);
    } else {
      cells.back().first += o;
      cells.back().second += e;
    }
  }
  ChiSquareResult r;
  for (const auto& [oc, ec] : cells) {
    if (ec <= 0.0) {
      if (oc > 0.0) r.statistic = HUGE_VAL;
      continue;
    }
    r.statistic += (oc - ec) * (oc - ec) / ec;
  }
  r.dof = static_cast<int>(cells.size()) - 1;
  if (r.dof < 1) return r;
  if (!std::isfinite(r.statistic)) {
    r.p_value = 0.0;
    return r;
  }
  boost::math::chi_squared_distribution<double> chi(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

/// Two-sample chi-square homogeneity test on integer draws. Values are
/// binned individually; cells with fewer than min_count pooled draws are
/// merged with their right neighbours.
template <class T>
[[nodiscard]] ChiSquareResult chi_square_two_sample(const std::vector<T>& a,
                                                    const std::vector<T>& b,
                                                    double min_count = 10.0) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi_square_two_sample needs data");
  std::map<T, std::pair<double, double>> counts;
  for (const T& v : a) counts[v].first += 1.0;
  for (const T& v : b) counts[v].second += 1.0;
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [value, c] : counts) {
    acc.first += c.first;
    acc.second += c.second;
    if (acc.first + acc.second >= min_count) {
      cells.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (cells.empty()) {
      cells.push_back(acc);
    } else {
      cells.back().first += acc.first;
      cells.back().second += acc.second;
    }
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  ChiSquareResult r;
  for (const auto& [ca, cb] : cells) {
    const double total = ca + cb;
    const double ea = total * na / n;
    const double eb = total * nb / n;
    r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  r.dof = static_cast<int>(cells.size()) - 1;
  if (r.dof < 1) return r;
  boost::math::chi_squared_distribution<double> chi(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

}  // namespace gwi::stats
