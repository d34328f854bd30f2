#include "ratiokit/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ratiokit/errors.hpp"
#include "text_util.hpp"

namespace ratiokit {

namespace {

constexpr double kLog10E = std::numbers::log10e;

}  // namespace

const char* to_string(TestMethod method) noexcept {
  return method == TestMethod::WilcoxonSignedRank ? "wilcoxon-signed-rank" : "kolmogorov-smirnov";
}

double log10_normal_cdf(double z) {
  if (z > -30.0) return std::log10(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // Mills-ratio asymptotic series; relative error far below 1e-12 for z <= -30.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) +
                        105.0 / (z2 * z2 * z2 * z2);
  const double ln = -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
                    std::log(series);
  return ln * kLog10E;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // 1 - sqrt(2 pi)/lambda * sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const double j = 2.0 * k - 1.0;
      sum += std::exp(-j * j * w);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double log10_kolmogorov_survival(double lambda) {
  if (lambda < 1.18) return std::log10(std::max(kolmogorov_survival(lambda), 1e-300));
  // 2 e^{-2 l^2} (1 - e^{-6 l^2} + e^{-16 l^2} - ...), factored to stay finite.
  const double l2 = lambda * lambda;
  double tail = 1.0;
  for (int k = 2; k <= 100; ++k) {
    const double term = std::exp(-2.0 * (k * k - 1) * l2);
    tail += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::log10(2.0) - 2.0 * l2 * kLog10E + std::log10(tail);
}

SignedRanks signed_ranks(std::span<const double> differences) {
  SignedRanks out;
  std::vector<std::pair<double, bool>> nz;
  for (double d : differences) {
    if (!std::isfinite(d)) throw InputError("difference is not finite");
    if (d == 0.0) {
      ++out.dropped_zero;
    } else {
      nz.emplace_back(std::abs(d), d > 0.0);
    }
  }
  std::sort(nz.begin(), nz.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.ranks.resize(nz.size());
  out.positive.resize(nz.size());
  for (std::size_t i = 0; i < nz.size();) {
    std::size_t j = i;
    while (j < nz.size() && nz[j].first == nz[i].first) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    const double t = static_cast<double>(j - i);
    out.tie_correction += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      out.ranks[k] = avg;
      out.positive[k] = nz[k].second;
      (nz[k].second ? out.w_plus : out.w_minus) += avg;
    }
    i = j;
  }
  return out;
}

double wilcoxon_exact_p(std::span<const double> ranks, double t_statistic) {
  // Average ranks are multiples of 1/2, so doubled ranks are integers.
  std::vector<std::size_t> doubled;
  std::size_t total = 0;
  for (double r : ranks) {
    const auto d = static_cast<std::size_t>(std::llround(2.0 * r));
    doubled.push_back(d);
    total += d;
  }
  std::vector<double> ways(total + 1, 0.0);
  ways[0] = 1.0;
  std::size_t reach = 0;
  for (auto d : doubled) {
    reach += d;
    for (std::size_t w = reach; w >= d; --w) {
      ways[w] += ways[w - d];
      if (w == d) break;
    }
  }
  const auto limit = static_cast<long long>(std::floor(2.0 * t_statistic + 1e-9));
  double below = 0.0;
  for (long long w = 0; w <= limit && w <= static_cast<long long>(total); ++w) below += ways[w];
  const double p = 2.0 * below / std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, p);
}

std::pair<double, double> wilcoxon_normal_p(std::size_t n, double tie_correction,
                                            double t_statistic) {
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction / 48.0;
  if (!(var > 0.0)) return {1.0, 0.0};
  const double z = std::min(0.0, (t_statistic - mean + 0.5) / std::sqrt(var));
  const double log10_p = std::min(0.0, std::log10(2.0) + log10_normal_cdf(z));
  return {std::pow(10.0, log10_p), log10_p};
}

TestReport wilcoxon_signed_rank(std::span<const double> differences, WilcoxonPMethod method) {
  const SignedRanks sr = signed_ranks(differences);
  const std::size_t n = sr.ranks.size();
  if (n < 5) {
    throw InputError("Wilcoxon signed-rank test needs at least 5 non-zero differences, got " +
                     std::to_string(n));
  }
  TestReport rep;
  rep.method = TestMethod::WilcoxonSignedRank;
  rep.w_plus = sr.w_plus;
  rep.w_minus = sr.w_minus;
  rep.statistic = std::min(sr.w_plus, sr.w_minus);
  rep.n_effective = n;
  rep.dropped_zero = sr.dropped_zero;
  const bool exact = method == WilcoxonPMethod::Exact || (method == WilcoxonPMethod::Auto && n <= 25);
  if (exact) {
    rep.p_method = "exact";
    rep.p_value = wilcoxon_exact_p(sr.ranks, rep.statistic);
    rep.log10_p = std::log10(rep.p_value);
  } else {
    rep.p_method = "normal";
    std::tie(rep.p_value, rep.log10_p) = wilcoxon_normal_p(n, sr.tie_correction, rep.statistic);
  }
  return rep;
}

TestReport wilcoxon_signed_rank(std::span<const std::pair<double, double>> on_off,
                                WilcoxonPMethod method) {
  std::vector<double> d;
  d.reserve(on_off.size());
  for (const auto& [on, off] : on_off) d.push_back(on - off);
  return wilcoxon_signed_rank(d, method);
}

double ks_statistic(std::span<const double> values, const std::function<double(double)>& null_cdf) {
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = null_cdf(x[i]);
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InputError("null CDF returned " + detail::shortest(f) + " outside [0, 1]", i);
    }
    if (f < previous - 1e-12) {
      throw InputError("null CDF is not monotone at " + detail::shortest(x[i]), i);
    }
    previous = f;
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - f, f - di / n});
  }
  return d;
}

TestReport ks_test(std::span<const double> values, const std::function<double(double)>& null_cdf) {
  if (values.size() < 5) {
    throw InputError("Kolmogorov-Smirnov test needs at least 5 values, got " +
                     std::to_string(values.size()));
  }
  TestReport rep;
  rep.method = TestMethod::KolmogorovSmirnov;
  rep.statistic = ks_statistic(values, null_cdf);
  rep.n_effective = values.size();
  const double sn = std::sqrt(static_cast<double>(values.size()));
  const double lambda = (sn + 0.12 + 0.11 / sn) * rep.statistic;
  rep.p_method = "kolmogorov-asymptotic";
  rep.log10_p = std::min(0.0, log10_kolmogorov_survival(lambda));
  rep.p_value = lambda < 1.18 ? kolmogorov_survival(lambda) : std::pow(10.0, rep.log10_p);
  if (rep.p_value > 0.0 && lambda < 1.18) rep.log10_p = std::log10(rep.p_value);
  return rep;
}

}  // namespace ratiokit
