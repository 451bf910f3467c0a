#include "gwi/analytics.hpp"
#include "gwi/ensemble.hpp"
#include "gwi/tailstats.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace gwi;

namespace {

std::vector<Count> draw(const DistSpec& d, std::size_t n, std::uint64_t seed) {
  std::vector<Count> out(n);
  const RandomStream root(seed);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = root.derive(i);
    out[i] = sample(d, rng);
  }
  return out;
}

}  // namespace

TEST(TailStats, EmpiricalTailExamples) {
  const std::vector<Count> fives(20, 5);
  EXPECT_EQ(empirical_tail(fives, 4.0), 1.0);
  EXPECT_EQ(empirical_tail(fives, 5.0), 0.0);
  EXPECT_EQ(empirical_tail(fives, -3.0), 1.0);
  const std::vector<Count> mixed{0, 1, 2, 3};
  EXPECT_EQ(empirical_tail(mixed, 1.5), 0.5);
  EXPECT_THROW((void)empirical_tail(std::vector<Count>{}, 1.0), std::invalid_argument);
}

TEST(TailStats, EmpiricalTailMatchesExactTail) {
  const DistSpec d = DiscretePareto(1.0);
  const auto xs = draw(d, 1000000, 17);
  const double p = exact_tail(d, 100.0);
  const double se = std::sqrt(p * (1 - p) / 1e6);
  EXPECT_NEAR(empirical_tail(xs, 100.0), p, 4.0 * se);
}

TEST(TailStats, HillExamples) {
  const std::vector<Count> equal(1000, 7);
  EXPECT_THROW((void)hill(std::span<const Count>(equal), 50), std::invalid_argument);
  EXPECT_THROW((void)hill(std::span<const Count>(equal), 5), std::invalid_argument);
  const std::vector<Count> few{1, 2, 3};
  EXPECT_THROW((void)hill(std::span<const Count>(few), 10), std::invalid_argument);

  const auto xs = draw(DiscretePareto(1.0), 100000, 5);
  const auto k = static_cast<std::size_t>(std::sqrt(1e5));
  const HillEstimate h = hill(std::span<const Count>(xs), k);
  EXPECT_GE(h.alpha_hat, 0.9);
  EXPECT_LE(h.alpha_hat, 1.1);
  EXPECT_NEAR(h.ci_low, h.alpha_hat * (1 - 1.96 / std::sqrt(double(h.k))), 1e-12);
  EXPECT_NEAR(h.ci_high, h.alpha_hat * (1 + 1.96 / std::sqrt(double(h.k))), 1e-12);
}

TEST(TailStats, HillInvariances) {
  const auto xs = draw(DiscretePareto(1.5), 50000, 8);
  const HillEstimate base = hill(std::span<const Count>(xs), 200);
  std::vector<Count> scaled(xs);
  for (Count& v : scaled) v *= 7;
  EXPECT_DOUBLE_EQ(hill(std::span<const Count>(scaled), 200).alpha_hat, base.alpha_hat);
  std::vector<Count> padded(xs);
  padded.insert(padded.end(), 30000, 0);
  const HillEstimate z = hill(std::span<const Count>(padded), 200);
  EXPECT_EQ(z.alpha_hat, base.alpha_hat);
  EXPECT_EQ(z.k, base.k);
}

TEST(TailStats, HillTieReduction) {
  // Top 20 values distinct, then a block of ties at the threshold.
  std::vector<Count> xs;
  for (Count v = 100; v < 120; ++v) xs.push_back(v);
  xs.insert(xs.end(), 50, 10);
  const HillEstimate h = hill(std::span<const Count>(xs), 30);
  EXPECT_EQ(h.k_requested, 30u);
  EXPECT_EQ(h.k, 20u);
  long double s = 0.0L;
  for (Count v = 100; v < 120; ++v) s += std::log(double(v)) - std::log(10.0);
  EXPECT_NEAR(h.alpha_hat, static_cast<double>(20 / s), 1e-12);
}

TEST(TailStats, SelfConsistentRatio) {
  for (const DistSpec& d : {DistSpec(DiscretePareto(0.8)), DistSpec(DiscretePareto(1.5, 0.5))}) {
    const auto xs = draw(d, 200000, 99);
    const TailReport r = tail_ratio_curve(std::span<const Count>(xs), d, {0.1, 0.01, 0.001});
    ASSERT_EQ(r.x_grid.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LT(std::fabs(r.ratio[i] - 1.0), 4.0 * r.ratio_se(i)) << i;
      EXPECT_FALSE(r.unreliable[i]);
    }
  }
}

TEST(TailStats, ReportInvariants) {
  const DistSpec d = DiscretePareto(0.8);
  const auto xs = draw(d, 5000, 3);
  const TailReport r =
      tail_ratio_curve(std::span<const Count>(xs), d, {0.001, 0.5, 0.1, 0.01, 1e-5});
  ASSERT_EQ(r.levels.size(), 5u);
  for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
    EXPECT_GE(r.empirical_tail[i], 0.0);
    EXPECT_LE(r.empirical_tail[i], 1.0);
    const double p = r.empirical_tail[i];
    EXPECT_DOUBLE_EQ(r.standard_errors[i], std::sqrt(p * (1 - p) / 5000.0));
    EXPECT_EQ(r.unreliable[i], r.levels[i] < 1.0 / 5000.0);
    if (i > 0) {
      EXPECT_GT(r.x_grid[i], r.x_grid[i - 1]);
      EXPECT_LE(r.empirical_tail[i], r.empirical_tail[i - 1]);
    }
  }
  EXPECT_TRUE(r.unreliable.back());
  const std::string csv = to_csv(r);
  EXPECT_EQ(csv.rfind("x,empirical,reference,ratio,se\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_THROW((void)tail_ratio_curve(std::span<const Count>(xs), d, {1.5}), std::invalid_argument);
  EXPECT_THROW((void)tail_ratio_curve(std::span<const Count>(xs), d, {}), std::invalid_argument);
}

TEST(TailStats, KaramataBelowOne) {
  const auto half = karamata_check(DiscretePareto(0.5), {1e2, 1e4, 1e6});
  ASSERT_EQ(half.size(), 3u);
  EXPECT_NEAR(half.back().ratio, 0.5, 0.005);
  // Oracle: integral of the step tail by direct partial sums.
  const double x = 1e4;
  const double area = static_cast<double>(oracle::power_partial_sum(0.5, 10000));
  EXPECT_NEAR(half[1].ratio, x * std::pow(1 + x, -0.5) / area, 1e-12);

  const auto pt8 = karamata_check(DiscretePareto(0.8), {1e2, 1e3, 1e4, 1e5, 1e6});
  for (std::size_t i = 0; i < pt8.size(); ++i) {
    EXPECT_NEAR(pt8[i].target, 0.2, 1e-15);
    if (i > 0) {
      EXPECT_LT(std::fabs(pt8[i].ratio - 0.2), std::fabs(pt8[i - 1].ratio - 0.2));
    }
  }
  const double ref = 1e6 * std::pow(1 + 1e6, -0.8) /
                     static_cast<double>(oracle::power_partial_sum(0.8, 1000000));
  EXPECT_NEAR(pt8.back().ratio, ref, 1e-12);
  EXPECT_EQ(karamata_check(DiscretePareto(0.8), {1e3, 1e6}).back().ratio, pt8.back().ratio);
}

TEST(TailStats, KaramataAboveOne) {
  const auto r = karamata_check(DiscretePareto(1.5), {1e3, 1e6});
  EXPECT_EQ(r.back().target, 0.5);
  EXPECT_NEAR(r.back().ratio, 0.5, 0.005);
  // Oracle for x = 1000: sum_{k >= 1000} (1+k)^-1.5 = zeta(1.5) - sum_{k < 1000}.
  const double tail = boost::math::zeta(1.5) - static_cast<double>(oracle::power_partial_sum(1.5, 1000));
  EXPECT_NEAR(r.front().ratio, 1000 * std::pow(1001.0, -1.5) / tail, 1e-9);
}

TEST(TailStats, KaramataRejects) {
  EXPECT_THROW((void)karamata_check(Constant(3), {10.0}), std::invalid_argument);
  EXPECT_THROW((void)karamata_check(Poisson(1.0), {10.0}), std::invalid_argument);
  EXPECT_THROW((void)karamata_check(DiscretePareto(1.0), {10.0}), std::invalid_argument);
  EXPECT_THROW((void)karamata_check(DiscretePareto(0.5), {-1.0}), std::invalid_argument);
}

TEST(TailStats, PotterExamples) {
  const auto trivial = potter_check(DiscretePareto(0.8), 0.1, {1.0}, 100);
  EXPECT_TRUE(trivial.found);
  EXPECT_EQ(trivial.x0, 1.0);
  EXPECT_EQ(trivial.violations, 0u);

  const auto r = potter_check(DiscretePareto(0.8), 0.1, {2.0, 5.0, 10.0}, 10000);
  EXPECT_TRUE(r.found);
  EXPECT_LE(r.x0, 1e4);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.checked, 100u);

  double last = 0.0;
  for (double beta : {0.0, 1.0, 2.0}) {
    const auto p = potter_check(DiscretePareto(1.0, beta), 0.1, {2.0, 5.0, 10.0}, 1000000);
    ASSERT_TRUE(p.found) << beta;
    EXPECT_EQ(p.violations, 0u);
    EXPECT_GE(p.x0, last);
    last = p.x0;
  }
  EXPECT_GT(last, 1e4);
  const auto miss = potter_check(DiscretePareto(1.0, 2.0), 0.1, {2.0, 5.0, 10.0}, 100);
  EXPECT_FALSE(miss.found);
  EXPECT_THROW((void)potter_check(DiscretePareto(0.8), 0.0, {2.0}, 10), std::invalid_argument);
  EXPECT_THROW((void)potter_check(DiscretePareto(0.8), 0.1, {0.5}, 10), std::invalid_argument);
}

TEST(TailStats, LargeDeviationExamples) {
  const DistSpec eta = DiscretePareto(1.5);
  const auto rep = large_dev_check(eta, 3.0, {1, 2, 4}, {1, 2, 5, 10}, 20000, 7);
  for (const auto& row : rep.rows) {
    if (row.n == 1) {
      EXPECT_EQ(row.ratio, 1.0);
      EXPECT_EQ(row.ratio_upper, 1.0);
    } else {
      EXPECT_GE(row.ratio_upper, row.ratio);
    }
  }
  EXPECT_EQ(rep.rows.size(), 12u);
  EXPECT_THROW((void)large_dev_check(eta, 3.0, {2}, {0.5}, 100, 1), std::invalid_argument);
  EXPECT_THROW((void)large_dev_check(eta, 2.0, {2}, {1.0}, 100, 1), std::invalid_argument);
  EXPECT_THROW((void)large_dev_check(DiscretePareto(0.8), 3.0, {2}, {1.0}, 100, 1),
               std::invalid_argument);
  EXPECT_THROW((void)large_dev_check(DiscretePareto(2.5), 3.0, {2}, {1.0}, 100, 1),
               std::invalid_argument);
}

TEST(TailStats, LargeDeviationThreadIndependent) {
  const auto a = large_dev_check(DiscretePareto(1.5), 3.0, {2, 4, 8}, {1, 2}, 5000, 11, 1);
  const auto b = large_dev_check(DiscretePareto(1.5), 3.0, {2, 4, 8}, {1, 2}, 5000, 11, 4);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].p_hat, b.rows[i].p_hat);
}

TEST(TailStats, ConvolutionWithZeroIsExact) {
  const auto c = convolution_check(DiscretePareto(0.8), Constant(0), {0.1, 0.01, 1e-4});
  EXPECT_EQ(c.reference, 1);
  for (std::size_t i = 0; i < c.report.x_grid.size(); ++i) {
    EXPECT_EQ(c.report.empirical_tail[i], c.report.reference_tail[i]);
    EXPECT_EQ(c.report.ratio[i], 1.0);
  }
}

TEST(TailStats, ConvolutionMatchesBruteForce) {
  const DistSpec a = DiscretePareto(0.8);
  const DistSpec b = Poisson(1.0);
  const auto c = convolution_check(a, b, {0.1, 0.01});
  for (std::size_t i = 0; i < c.report.x_grid.size(); ++i) {
    const auto x = static_cast<Count>(c.report.x_grid[i]);
    long double below = 0.0L;  // P(A + B <= x) by double sum over the pmfs
    for (Count j = 0; j <= x; ++j)
      for (Count k = 0; j + k <= x; ++k) below += pmf(a, j) * pmf(b, k);
    EXPECT_NEAR(c.report.empirical_tail[i], 1.0 - static_cast<double>(below), 1e-12);
  }
}

TEST(TailStats, ConvolutionCases) {
  const auto eq = convolution_check(DiscretePareto(0.8), DiscretePareto(0.8), {1e-4});
  EXPECT_EQ(eq.report.predicted_limit, 2.0);
  EXPECT_NEAR(eq.report.ratio.back(), 2.0, 0.1);
  const auto light = convolution_check(DiscretePareto(0.8), Poisson(1.0), {1e-4});
  EXPECT_EQ(light.report.predicted_limit, 1.0);
  EXPECT_NEAR(light.report.ratio.back(), 1.0, 0.05);
  const auto swapped = convolution_check(Poisson(1.0), DiscretePareto(0.8), {1e-4});
  EXPECT_EQ(swapped.reference, 2);
  EXPECT_NEAR(swapped.report.ratio.back(), light.report.ratio.back(), 1e-12);
  const auto heavier = convolution_check(DiscretePareto(1.5), DiscretePareto(0.8), {1e-3});
  EXPECT_EQ(heavier.reference, 2);
  EXPECT_THROW((void)convolution_check(Poisson(1.0), Poisson(2.0), {0.1}), std::invalid_argument);
  EXPECT_THROW((void)convolution_check(DiscretePareto(0.5), Poisson(1.0), {1e-6}, 1000),
               std::runtime_error);
}

TEST(TailStats, RandomSumExamples) {
  const auto one = random_sum_check(DiscretePareto(0.8), Constant(1), {0.1, 0.01, 0.001}, 20000, 4);
  EXPECT_EQ(one.predicted_limit, 1.0);
  const auto tau_draws = [&] {
    std::vector<Count> v(20000);
    const RandomStream root(4);
    for (std::size_t i = 0; i < v.size(); ++i) {
      RandomStream rng = root.derive(i);
      v[i] = sample(DiscretePareto(0.8), rng);
    }
    return v;
  }();
  const auto direct = tail_ratio_curve(std::span<const Count>(tau_draws), DiscretePareto(0.8),
                                       {0.1, 0.01, 0.001});
  EXPECT_EQ(one.empirical_tail, direct.empirical_tail);

  const auto two = random_sum_check(DiscretePareto(0.8), Constant(2), {0.01}, 200000, 6);
  EXPECT_NEAR(two.predicted_limit, std::pow(2.0, 0.8), 1e-15);
  // sum = 2 tau exactly, so P(2 tau > x) = T(x / 2).
  EXPECT_NEAR(two.ratio[0] * two.reference_tail[0],
              two.empirical_tail[0], 1e-15);
  EXPECT_NEAR(two.ratio[0], exact_tail(DiscretePareto(0.8), std::floor(two.x_grid[0] / 2.0)) /
                                two.reference_tail[0],
              4.0 * two.ratio_se(0) + 0.01);

  EXPECT_THROW((void)random_sum_check(Poisson(1.0), Constant(1), {0.1}, 10, 1),
               std::invalid_argument);
  EXPECT_THROW((void)random_sum_check(DiscretePareto(0.8), Constant(0), {0.1}, 10, 1),
               std::invalid_argument);
  EXPECT_THROW((void)random_sum_check(DiscretePareto(1.5), DiscretePareto(1.2), {0.1}, 10, 1),
               std::invalid_argument);
}
