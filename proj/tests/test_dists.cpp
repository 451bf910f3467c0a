#include "gwi/dists.hpp"
#include "gwi/dists_json.hpp"
#include "gwi/stats.hpp"
#include "oracles/oracles.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace gwi;

namespace {

std::vector<DistSpec> all_kinds() {
  return {Constant(3),          Bernoulli(0.3),        Binomial(7, 0.4),
          Poisson(2.5),         Geometric(0.35),       FinitePmf({0.1, 0.0, 0.6, 0.3}),
          DiscretePareto(0.8),  DiscretePareto(1.5),   DiscretePareto(1.0, 2.0),
          DiscretePareto(1.2, -0.7)};
}

}  // namespace

TEST(Dists, ConstructorsRejectBadParameters) {
  EXPECT_THROW(Bernoulli(-0.1), std::invalid_argument);
  EXPECT_THROW(Bernoulli(1.5), std::invalid_argument);
  EXPECT_THROW(Binomial(0, 0.5), std::invalid_argument);
  EXPECT_THROW(Poisson(-1.0), std::invalid_argument);
  EXPECT_THROW(Geometric(0.0), std::invalid_argument);
  EXPECT_THROW(FinitePmf({0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(FinitePmf({1.2, -0.2}), std::invalid_argument);
  EXPECT_THROW(DiscretePareto(0.0), std::invalid_argument);
  EXPECT_THROW(DiscretePareto(1.0, std::nan("")), std::invalid_argument);
}

TEST(Dists, SampleDegenerateLaws) {
  RandomStream rng(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample(Constant(3), rng), 3u);
    EXPECT_EQ(sample(Bernoulli(0.0), rng), 0u);
    EXPECT_EQ(sample(Bernoulli(1.0), rng), 1u);
    EXPECT_EQ(sample(Poisson(0.0), rng), 0u);
    EXPECT_EQ(sample(Geometric(1.0), rng), 0u);
  }
}

TEST(Dists, ExactTailExamples) {
  EXPECT_EQ(exact_tail(Constant(3), 2.5), 1.0);
  EXPECT_EQ(exact_tail(Constant(3), 3.0), 0.0);
  // T(0) = 1: the support starts at 1.
  EXPECT_EQ(exact_tail(DiscretePareto(0.8), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(exact_tail(DiscretePareto(0.8), 1.0), std::pow(2.0, -0.8));
  EXPECT_EQ(exact_tail(DiscretePareto(0.8), -1.0), 1.0);
  EXPECT_EQ(exact_tail(DiscretePareto(0.8), -0.5), 1.0);
  // Poisson(1): P(X > 0) by summing the pmf directly.
  double below = std::exp(-1.0);
  EXPECT_NEAR(exact_tail(Poisson(1.0), 0.0), 1.0 - below, 1e-15);
  EXPECT_NEAR(exact_tail(Poisson(1.0), 0.0), 0.63212055882855767, 1e-14);
}

TEST(Dists, DiscreteParetoTailIsClosedForm) {
  const DiscretePareto d(0.8);
  for (double k : {0.0, 1.0, 9.0, 99.0, 12345.0}) {
    EXPECT_NEAR(d.tail(k), std::pow(1.0 + k, -0.8), 1e-15 * std::pow(1.0 + k, -0.8));
    EXPECT_EQ(d.tail(k + 0.5), d.tail(k));
  }
  const DiscretePareto l(1.2, -0.7);
  for (double k : {0.0, 3.0, 1000.0}) {
    const double t = std::pow(1.0 + k, -1.2) * std::pow(1.0 + std::log1p(k), -0.7);
    EXPECT_NEAR(l.tail(k), t, 1e-14 * t);
  }
}

TEST(Dists, DiscreteParetoPlateauKeepsTailMonotone) {
  const DiscretePareto d(1.0, 2.0);
  // Unscaled tail peaks near e^{beta/alpha - 1} - 1 = e - 1.
  EXPECT_GT(d.plateau(), 0u);
  EXPECT_LE(d.scale(), 1.0);
  double prev = 1.0;
  for (double k = -1.0; k < 200.0; k += 1.0) {
    const double t = exact_tail(d, k);
    EXPECT_LE(t, prev + 1e-16) << k;
    EXPECT_LE(t, 1.0);
    prev = t;
  }
  EXPECT_EQ(exact_tail(d, 0.0), 1.0);
  EXPECT_EQ(pmf(d, 0), 0.0);
}

TEST(Dists, PmfExamples) {
  EXPECT_DOUBLE_EQ(pmf(Bernoulli(0.3), 1), 0.3);
  EXPECT_NEAR(pmf(DiscretePareto(1.0), 1), 0.5, 1e-15);
  EXPECT_NEAR(pmf(DiscretePareto(1.0), 2), 0.5 - 1.0 / 3.0, 1e-15);
  EXPECT_EQ(pmf(DiscretePareto(1.0), 0), 0.0);
  EXPECT_DOUBLE_EQ(pmf(FinitePmf({0.2, 0.8}), 0), 0.2);
}

TEST(Dists, TailPmfConsistency) {
  for (const DistSpec& d : all_kinds()) {
    double cumulative = 0.0;
    for (Count k = 0; k <= 60; ++k) {
      const double kd = static_cast<double>(k);
      EXPECT_NEAR(exact_tail(d, kd - 1.0) - exact_tail(d, kd), pmf(d, k), 1e-12)
          << kind_name(d) << " k=" << k;
      cumulative += pmf(d, k);
      EXPECT_NEAR(cumulative + exact_tail(d, kd), 1.0, 1e-12) << kind_name(d) << " k=" << k;
    }
  }
}

TEST(Dists, TailIsMonotoneInUnitInterval) {
  for (const DistSpec& d : all_kinds()) {
    double prev = 1.0;
    for (double x = -2.0; x < 500.0; x += 0.37) {
      const double t = exact_tail(d, x);
      EXPECT_GE(t, 0.0);
      EXPECT_LE(t, prev) << kind_name(d) << " x=" << x;
      prev = t;
    }
  }
}

TEST(Dists, MeanExamples) {
  EXPECT_EQ(mean(Bernoulli(0.3)).value(), 0.3);
  EXPECT_TRUE(mean(DiscretePareto(1.0)).is_infinite());
  EXPECT_TRUE(mean(DiscretePareto(0.8)).is_infinite());
  EXPECT_TRUE(mean(DiscretePareto(1.0, -1.0)).is_infinite());
  EXPECT_TRUE(mean(DiscretePareto(1.0, -1.5)).is_finite());
  // E X = sum_{k>=0} (1+k)^-1.5 = zeta(1.5).
  const double z = boost::math::zeta(1.5);
  EXPECT_NEAR(z, 2.6123753486854883, 1e-14);
  EXPECT_NEAR(mean(DiscretePareto(1.5)).value(), z, 1e-9 * z);
  EXPECT_NEAR(mean(DiscretePareto(3.0)).value(), boost::math::zeta(3.0), 1e-10);
  EXPECT_NEAR(mean(Poisson(2.5)).value(), 2.5, 1e-15);
  EXPECT_NEAR(mean(Geometric(0.25)).value(), 3.0, 1e-15);
  EXPECT_NEAR(mean(FinitePmf({0.1, 0.0, 0.6, 0.3})).value(), 2.1, 1e-15);
}

TEST(Dists, BoundaryMomentWithLogFactor) {
  // alpha = r = 1, beta = -1.5: finite. Oracle: direct sum to K plus the
  // closed-form integral int_K^inf (1+t)^-1 (1+log(1+t))^-1.5 dt
  // = 2 (1+log(1+K))^-1/2 and the f(K)/2 end correction.
  const long long K = 2'000'000;
  long double direct = 0.0L;
  for (long long k = K; k-- > 0;) {
    direct += 1.0L / (1.0L + k) * std::pow(1.0L + std::log1p(static_cast<long double>(k)), -1.5L);
  }
  const double lk = std::log1p(static_cast<double>(K));
  const double fK = 1.0 / (1.0 + K) * std::pow(1.0 + lk, -1.5);
  const double oracle = static_cast<double>(direct) + 2.0 / std::sqrt(1.0 + lk) + 0.5 * fK;
  EXPECT_NEAR(mean(DiscretePareto(1.0, -1.5)).value(), oracle, 1e-9);
}

TEST(Dists, MomentExamples) {
  EXPECT_EQ(moment(Constant(2), 3.0).value(), 8.0);
  EXPECT_TRUE(moment(DiscretePareto(0.8), 1.0).is_infinite());
  EXPECT_EQ(moment(Bernoulli(0.3), 2.0).value(), 0.3);
  EXPECT_THROW((void)moment(Bernoulli(0.3), 0.0), std::invalid_argument);
  // E X^2 = sum (2k+1)(1+k)^-3.5 = 2 zeta(2.5) - zeta(3.5).
  const double expect = 2.0 * boost::math::zeta(2.5) - boost::math::zeta(3.5);
  EXPECT_NEAR(moment(DiscretePareto(3.5), 2.0).value(), expect, 1e-9 * expect);
  EXPECT_TRUE(moment(DiscretePareto(1.5), 1.5).is_infinite());
  EXPECT_TRUE(moment(DiscretePareto(1.5, -2.0), 1.5).is_finite());
  EXPECT_NEAR(variance(Poisson(2.5)).value(), 2.5, 1e-12);
  EXPECT_NEAR(variance(Binomial(7, 0.4)).value(), 7 * 0.4 * 0.6, 1e-12);
  EXPECT_NEAR(moment(Poisson(2.0), 3.0).value(), 2.0 + 3 * 4.0 + 8.0, 1e-9);
}

TEST(Dists, LogMomentExamples) {
  EXPECT_EQ(log_moment(Constant(1)).value(), 0.0);
  EXPECT_EQ(log_moment(Constant(0)).value(), 0.0);
  // Direct summation of log(k) pmf(k) to 10^6 plus an analytic remainder
  // bound: sum_{k>K} log(k) pmf(k) <= log(K) T(K) + int_K^inf T/t.
  const DiscretePareto d(0.5);
  const DistSpec spec = d;
  long double direct = 0.0L;
  const long long K = 1'000'000;
  for (long long k = 2; k <= K; ++k) {
    direct += std::log(static_cast<double>(k)) * pmf(spec, static_cast<Count>(k));
  }
  const double value = log_moment(spec).value();
  EXPECT_GT(value, 0.0);
  EXPECT_TRUE(std::isfinite(value));
  EXPECT_GE(value, static_cast<double>(direct) - 1e-9);
  const double remainder_hi =
      std::log(static_cast<double>(K)) * d.tail(K) + d.tail(K) / 0.5;  // int_K^inf t^-1.5
  EXPECT_LE(value, static_cast<double>(direct) + remainder_hi + 1e-9);
  for (double a : {0.1, 0.8, 2.0}) {
    EXPECT_TRUE(log_moment(DiscretePareto(a)).is_finite());
  }
}

TEST(Dists, QuantileIsSmallestCrossing) {
  for (const DistSpec& d : all_kinds()) {
    for (double level : {0.5, 0.1, 0.01, 1e-4}) {
      const Count q = quantile(d, level);
      EXPECT_LE(exact_tail(d, static_cast<double>(q)), level);
      if (q > 0) {
        EXPECT_GT(exact_tail(d, static_cast<double>(q) - 1.0), level);
      }
    }
  }
  // (1+k)^-1 <= 1.5e-3 first holds at k = 666.
  EXPECT_EQ(quantile(DiscretePareto(1.0), 1.5e-3), 666u);
}

TEST(Dists, RegularVariationRatio) {
  struct Case {
    double alpha, beta;
  };
  for (Case c : {Case{0.5, 0.0}, Case{0.8, 0.0}, Case{1.0, 0.0}, Case{1.5, 0.0},
                 Case{1.5, 0.5}, Case{1.5, -0.5}}) {
    const DiscretePareto d(c.alpha, c.beta);
    for (double q : {2.0, 10.0}) {
      const double ratio = d.tail(q * 1e6) / d.tail(1e6);
      EXPECT_LT(std::fabs(ratio - std::pow(q, -c.alpha)), 0.01)
          << c.alpha << ' ' << c.beta << ' ' << q;
    }
  }
}

TEST(Dists, PowerClosure) {
  // P(X^c > x) = T(x^{1/c}) is regularly varying with index alpha / c.
  const DiscretePareto d(0.8);
  for (double c : {0.5, 2.0, 3.0}) {
    for (double q : {2.0, 10.0}) {
      const double x = 1e6;
      const double ratio = d.tail(std::pow(q * x, 1.0 / c)) / d.tail(std::pow(x, 1.0 / c));
      EXPECT_LT(std::fabs(ratio - std::pow(q, -0.8 / c)), 0.01) << c << ' ' << q;
    }
  }
}

TEST(Dists, TruncatedParetoMeanMatchesTailSum) {
  // E min(X, 100) = sum_{k<100} T(k).
  const DistSpec d = DiscretePareto(1.0);
  const double expect = static_cast<double>(oracle::power_partial_sum(1.0, 100));
  RandomStream rng(7);
  std::vector<double> draws(1'000'000);
  for (double& v : draws) v = std::min<double>(100.0, static_cast<double>(sample(d, rng)));
  const auto est = stats::mean_se(draws);
  EXPECT_NEAR(est.mean, expect, 3.0 * est.se);
}

TEST(Dists, SamplerChiSquare) {
  for (const DistSpec& d : all_kinds()) {
    if (std::holds_alternative<Constant>(d)) continue;
    RandomStream rng(1234);
    constexpr int kDraws = 100000;
    std::vector<double> observed(52, 0.0);
    std::vector<double> expected(52, 0.0);
    for (int i = 0; i < kDraws; ++i) {
      const Count v = sample(d, rng);
      observed[std::min<Count>(v, 51)] += 1.0;
    }
    for (Count k = 0; k <= 50; ++k) expected[k] = kDraws * pmf(d, k);
    expected[51] = kDraws * exact_tail(d, 50.0);
    const auto r = stats::chi_square_gof(observed, expected);
    EXPECT_GT(r.p_value, 0.001) << kind_name(d) << " chi2=" << r.statistic;
  }
}

TEST(Dists, SamplerInvertsTailExactly) {
  // The draw k is the smallest k with U > T(k), so T(k) < U <= T(k-1).
  const DiscretePareto d(1.3, 0.8);
  for (std::uint64_t key = 0; key < 2000; ++key) {
    RandomStream a(key);
    RandomStream b(key);
    const double u = a.uniform();
    const Count k = detail::sample_discrete_pareto(d, b);
    EXPECT_LT(d.tail(static_cast<double>(k)), u);
    if (k > 0) {
      EXPECT_GE(d.tail(static_cast<double>(k) - 1.0), u);
    }
  }
}

TEST(Dists, JsonRoundTrip) {
  for (const DistSpec& d : all_kinds()) {
    const auto j = to_json(d);
    const DistSpec back = dist_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back, d) << j.dump();
  }
  EXPECT_THROW(dist_from_json(nlohmann::json::parse(R"({"kind":"poisson","rate":1,"x":2})")),
               std::invalid_argument);
  EXPECT_THROW(dist_from_json(nlohmann::json::parse(R"({"kind":"zipf"})")),
               std::invalid_argument);
  const DistSpec p = dist_from_json(nlohmann::json::parse(R"({"kind":"discrete_pareto","alpha":0.8})"));
  EXPECT_EQ(std::get<DiscretePareto>(p).log_factor(), 0.0);
}

TEST(Dists, SaturatingArithmetic) {
  EXPECT_EQ(saturating_add(kCountCap - 1, 5), kCountCap);
  EXPECT_EQ(saturating_mul(kCountCap / 2, 4), kCountCap);
  EXPECT_EQ(saturating_mul(0, kCountCap), 0u);
  EXPECT_EQ(saturating_mul(3, 4), 12u);
}
