#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ratiokit {

enum class TestMethod { WilcoxonSignedRank, KolmogorovSmirnov };

const char* to_string(TestMethod method) noexcept;

struct TestReport {
  TestMethod method = TestMethod::WilcoxonSignedRank;
  /// T = min(W+, W-) for Wilcoxon, D = sup |F_emp - F_null| for KS.
  double statistic = 0.0;
  std::size_t n_effective = 0;
  double p_value = 1.0;
  /// log10 of the p-value, finite even where p_value underflows to 0.
  double log10_p = 0.0;
  /// "exact", "normal" or "kolmogorov-asymptotic".
  std::string p_method;
  std::optional<std::uint64_t> seed;
  // Wilcoxon only.
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t dropped_zero = 0;
  /// Free-form descriptors (layout, null model, ...) in insertion order.
  std::vector<std::pair<std::string, std::string>> metadata;
};

enum class WilcoxonPMethod { Auto, Exact, Normal };

/// Ranked, zero-free absolute differences with the signed-rank sums.
struct SignedRanks {
  std::vector<double> ranks;  // average ranks of |d| in ascending |d| order, zeros excluded
  std::vector<bool> positive;
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t dropped_zero = 0;
  double tie_correction = 0.0;  // sum over tie groups of (t^3 - t)
};

SignedRanks signed_ranks(std::span<const double> differences);

/// Two-sided p for T = min(W+, W-) by enumerating the sign-flip distribution
/// of the given ranks (average ranks allowed). Practical for n <= ~60.
double wilcoxon_exact_p(std::span<const double> ranks, double t_statistic);

/// Two-sided normal approximation with tie-corrected variance and continuity
/// correction. Returns {p, log10 p}.
std::pair<double, double> wilcoxon_normal_p(std::size_t n, double tie_correction,
                                            double t_statistic);

/// Wilcoxon signed-rank test on differences d = on - off. Zero differences are
/// dropped; needs >= 5 non-zero differences. Auto uses exact enumeration for
/// n <= 25 and the normal approximation above.
TestReport wilcoxon_signed_rank(std::span<const double> differences,
                                WilcoxonPMethod method = WilcoxonPMethod::Auto);

TestReport wilcoxon_signed_rank(std::span<const std::pair<double, double>> on_off,
                                WilcoxonPMethod method = WilcoxonPMethod::Auto);

/// One-sample two-sided Kolmogorov-Smirnov test against a continuous null CDF.
/// Throws InputError with fewer than 5 values or when the null CDF is not
/// monotone (or leaves [0, 1]) along the sorted sample.
TestReport ks_test(std::span<const double> values, const std::function<double(double)>& null_cdf);

/// sup |F_emp - F| over a sample.
double ks_statistic(std::span<const double> values, const std::function<double(double)>& null_cdf);

/// Survival function of the Kolmogorov distribution, P(K > lambda), and its log10.
double kolmogorov_survival(double lambda);
double log10_kolmogorov_survival(double lambda);

/// log10 of the standard normal CDF, accurate far into the lower tail.
double log10_normal_cdf(double z);

}  // namespace ratiokit
