#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ratiokit/errors.hpp"
#include "ratiokit/hypothesis.hpp"
#include "ratiokit/random.hpp"

namespace ratiokit {
namespace {

// Brute force: share of all 2^n sign patterns over `ranks` whose
// min(W+, W-) is at most t (two-sided by construction).
double brute_force_p(const std::vector<double>& ranks, double t) {
  const std::size_t n = ranks.size();
  double total = 0.0;
  for (double r : ranks) total += r;
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double wp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1u) wp += ranks[k];
    }
    hits += std::min(wp, total - wp) <= t + 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(1ull << n);
}

TEST(Wilcoxon, AllPositiveFivePairs) {
  const std::vector<std::pair<double, double>> pairs{{2, 1}, {3, 1}, {5, 2}, {1.5, 1}, {9, 0}};
  const auto r = wilcoxon_signed_rank(pairs);
  EXPECT_EQ(r.method, TestMethod::WilcoxonSignedRank);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.n_effective, 5u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 16.0);
  EXPECT_NEAR(r.log10_p, std::log10(1.0 / 16.0), 1e-12);
  EXPECT_EQ(r.p_method, "exact");
  EXPECT_EQ(r.w_plus, 15.0);
  EXPECT_EQ(r.w_minus, 0.0);
}

TEST(Wilcoxon, SymmetricTiedDifferences) {
  const std::vector<double> d{1, -1, 2, -2, 3, -3};
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_EQ(r.w_plus, 10.5);
  EXPECT_EQ(r.w_minus, 10.5);
  EXPECT_EQ(r.statistic, 10.5);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Wilcoxon, ZeroDifferencesDroppedAndCounted) {
  const std::vector<double> d{0, 0, 1, 2, 3, 4, -5, 0};
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_EQ(r.dropped_zero, 3u);
  EXPECT_EQ(r.n_effective, 5u);
  EXPECT_EQ(r.statistic, 5.0);
  EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>(10, 0.0)), InputError);
  EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{1, 2, 0, 3, 4}), InputError);
}

TEST(Wilcoxon, SignedRanksAverageTies) {
  const auto sr = signed_ranks(std::vector<double>{-2, 1, 2, 0, 3, 2});
  ASSERT_EQ(sr.ranks.size(), 5u);
  EXPECT_EQ(sr.ranks, (std::vector<double>{1, 3, 3, 3, 5}));
  EXPECT_EQ(sr.w_minus, 3.0);
  EXPECT_EQ(sr.w_plus, 12.0);
  EXPECT_EQ(sr.tie_correction, 24.0);  // one triple: 3^3 - 3
}

TEST(Wilcoxon, ExactMatchesBruteForceForEverySignPatternAtEight) {
  std::vector<double> ranks{1, 2, 3, 4, 5, 6, 7, 8};
  for (std::uint32_t mask = 0; mask < 256; ++mask) {
    std::vector<double> d;
    for (int k = 0; k < 8; ++k) d.push_back((mask >> k & 1u) ? ranks[k] : -ranks[k]);
    const auto r = wilcoxon_signed_rank(d, WilcoxonPMethod::Exact);
    ASSERT_NEAR(r.p_value, brute_force_p(ranks, r.statistic), 1e-12) << mask;
  }
}

TEST(Wilcoxon, ExactMatchesBruteForceWithTies) {
  const std::vector<double> d{1, -1, 2, 2, -2, 3.5, 4, -4, 6, 7};
  const auto sr = signed_ranks(d);
  const auto r = wilcoxon_signed_rank(d, WilcoxonPMethod::Exact);
  EXPECT_NEAR(r.p_value, brute_force_p(sr.ranks, r.statistic), 1e-12);
  for (double t = 0; t <= 27.5; t += 0.5) {
    EXPECT_NEAR(wilcoxon_exact_p(sr.ranks, t), brute_force_p(sr.ranks, t), 1e-12) << t;
  }
}

TEST(Wilcoxon, NormalApproximationCloseToExactAtTwelve) {
  std::vector<double> ranks(12);
  for (int k = 0; k < 12; ++k) ranks[k] = k + 1;
  double worst = 0.0;
  for (double t = 0; t <= 39; t += 1) {
    const double exact = wilcoxon_exact_p(ranks, t);
    const double normal = wilcoxon_normal_p(12, 0.0, t).first;
    worst = std::max(worst, std::abs(exact - normal));
  }
  EXPECT_LE(worst, 0.02);
}

TEST(Wilcoxon, AutoSwitchesToNormalAboveTwentyFive) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.1, 1.0);
  std::vector<double> d(40);
  for (auto& x : d) x = g(rng);
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_EQ(r.p_method, "normal");
  const auto exact = wilcoxon_signed_rank(d, WilcoxonPMethod::Exact);
  EXPECT_EQ(exact.p_method, "exact");
  EXPECT_NEAR(r.p_value, exact.p_value, 0.01);
  d.resize(25);
  EXPECT_EQ(wilcoxon_signed_rank(d).p_method, "exact");
}

TEST(Wilcoxon, SymmetricUnderNegation) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.3, 1.0);
  for (std::size_t n : {8u, 30u, 300u}) {
    std::vector<double> d(n);
    for (auto& x : d) x = g(rng);
    std::vector<double> neg(d);
    for (auto& x : neg) x = -x;
    const auto a = wilcoxon_signed_rank(d);
    const auto b = wilcoxon_signed_rank(neg);
    EXPECT_EQ(a.statistic, b.statistic);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.w_plus, b.w_minus);
  }
}

TEST(Wilcoxon, ExtremeSignificanceStaysInLogSpace) {
  std::vector<double> d(3000);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = 1.0 + k;
  const auto r = wilcoxon_signed_rank(d);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(std::isfinite(r.log10_p));
  EXPECT_LT(r.log10_p, -300.0);
  // Oracle: log10 of 2 Phi(z) via the Mills-ratio series at the same z.
  const double n = 3000.0;
  const double mu = n * (n + 1) / 4.0;
  const double sigma = std::sqrt(n * (n + 1) * (2 * n + 1) / 24.0);
  const double z = (0.0 - mu + 0.5) / sigma;
  const double z2 = z * z;
  const double ln_phi = -0.5 * z2 - 0.5 * std::log(2 * std::numbers::pi) - std::log(-z) +
                        std::log1p(-1 / z2 + 3 / (z2 * z2) - 15 / (z2 * z2 * z2));
  EXPECT_NEAR(r.log10_p, (ln_phi + std::log(2.0)) / std::log(10.0), 1e-6);
}

TEST(LogNormalCdf, MatchesErfcAndTailSeries) {
  for (double z : {-1.0, -5.0, -20.0, -37.0}) {
    EXPECT_NEAR(log10_normal_cdf(z), std::log10(0.5 * std::erfc(-z / std::numbers::sqrt2)), 1e-9) << z;
  }
  for (double z : {-40.0, -100.0, -1000.0}) {
    const double z2 = z * z;
    const double ln = -0.5 * z2 - 0.5 * std::log(2 * std::numbers::pi) - std::log(-z) +
                      std::log1p(-1 / z2 + 3 / (z2 * z2));
    EXPECT_NEAR(log10_normal_cdf(z), ln / std::log(10.0), 1e-6 * std::abs(ln)) << z;
  }
  EXPECT_NEAR(log10_normal_cdf(0.0), std::log10(0.5), 1e-14);
}

TEST(Kolmogorov, SurvivalMatchesSeries) {
  auto series = [](double l) {
    double s = 0.0;
    for (int k = 1; k < 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * l * l);
    return s;
  };
  for (double l : {0.5, 0.8, 1.0, 1.36, 1.628, 2.5}) {
    EXPECT_NEAR(kolmogorov_survival(l), series(l), 1e-12) << l;
  }
  EXPECT_NEAR(kolmogorov_survival(1.358), 0.05, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(1.628), 0.01, 2e-4);
  EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-15);
  EXPECT_NEAR(log10_kolmogorov_survival(30.0), (std::log(2.0) - 1800.0) / std::log(10.0), 1e-9);
}

TEST(KsTest, ExactQuantilesGiveHalfStep) {
  const std::size_t n = 50;
  std::vector<double> x;
  for (std::size_t k = 1; k <= n; ++k) x.push_back((k - 0.5) / n);
  const auto r = ks_test(x, [](double v) { return v; });
  EXPECT_NEAR(r.statistic, 0.5 / n, 1e-15);
  EXPECT_EQ(r.method, TestMethod::KolmogorovSmirnov);
  EXPECT_EQ(r.p_method, "kolmogorov-asymptotic");
  const double sq = std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(r.p_value, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * r.statistic), 1e-15);
}

TEST(KsTest, PointMassGivesHalf) {
  const std::vector<double> x(20, 0.5);
  EXPECT_NEAR(ks_statistic(x, [](double v) { return v; }), 0.5, 1e-15);
}

TEST(KsTest, Errors) {
  EXPECT_THROW(ks_test(std::vector<double>{0.1, 0.2, 0.3, 0.4}, [](double v) { return v; }), InputError);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_THROW(ks_test(x, [](double v) { return 1.0 - v; }), InputError);
  EXPECT_THROW(ks_test(x, [](double v) { return 2.0 * v; }), InputError);
}

TEST(KsTest, CriticalValueCalibration) {
  int below = 0;
  for (int run = 0; run < 100; ++run) {
    Rng rng(derive_seed(555, run));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(100);
    for (auto& v : x) v = u(rng);
    below += ks_statistic(x, [](double v) { return v; }) < 1.63 / std::sqrt(100.0);
  }
  EXPECT_GE(below, 95);
}

TEST(KsTest, RejectionRateNearAlpha) {
  int reject = 0;
  for (int run = 0; run < 200; ++run) {
    Rng rng(derive_seed(777, run));
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(200);
    for (auto& v : x) v = e(rng);
    reject += ks_test(x, [](double v) { return -std::expm1(-v); }).p_value < 0.05;
  }
  EXPECT_GE(reject, 5);   // alpha / 2 of 200
  EXPECT_LE(reject, 20);  // 2 alpha of 200
}

}  // namespace
}  // namespace ratiokit
