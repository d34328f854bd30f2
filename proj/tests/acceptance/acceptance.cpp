// Acceptance checks: one PASS/FAIL line per criterion, tolerances fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ratiokit/binning.hpp"
#include "ratiokit/experiment.hpp"
#include "ratiokit/hypothesis.hpp"
#include "ratiokit/io.hpp"
#include "ratiokit/null_model.hpp"
#include "ratiokit/numerics.hpp"

using namespace ratiokit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// --- independent oracles ----------------------------------------------------

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (!(b > a)) return 0.0;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Uniform(a, b) interval pair: p_Q by direct integration of t p(t) p(qt)
// (a linear integrand, so Simpson is exact) over the support overlap.
double oracle_uniform_q_pdf(double a, double b, double q) {
  const double lo = std::max(a, a / q), hi = std::min(b, b / q);
  return simpson([&](double t) { return t / ((b - a) * (b - a)); }, lo, hi, 2);
}

// P_Q(q) = int p(t) F(q t) dt; F(q t) is piecewise linear with kinks at a/q, b/q.
double oracle_uniform_q_cdf(double a, double b, double q) {
  auto F = [&](double x) { return std::clamp((x - a) / (b - a), 0.0, 1.0); };
  std::vector<double> cuts{a, b, a / q, b / q};
  std::erase_if(cuts, [&](double c) { return c < a || c > b; });
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    s += simpson([&](double t) { return F(q * t) / (b - a); }, cuts[k], cuts[k + 1], 2);
  }
  return s;
}

double brute_force_wilcoxon_p(const std::vector<double>& ranks, double t) {
  const std::size_t n = ranks.size();
  const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
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

double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max({d, (i + 1) / n - x[i], x[i] - i / n});
  return d;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// --- criteria ----------------------------------------------------------------

Outcome poisson_flatness() {
  Outcome out;
  double worst_pdf = 0.0, worst_z = 0.0;
  for (double rate : {0.1, 1.0, 10.0}) {
    const auto model = NullModel::exponential(rate);
    const RatioDistribution dist(model, RatioTransform::standard_r());
    for (int k = 0; k < 1000; ++k) {
      worst_pdf = std::max(worst_pdf, std::abs(ratio_r_pdf(dist, (k + 0.5) / 1000.0) - 1.0));
    }
    // 10^6 ratios from independent interval pairs, 100 equal bins.
    const std::size_t n = 1'000'000, bins = 100;
    Rng rng(derive_seed(101, static_cast<std::uint64_t>(rate * 10)));
    std::vector<std::uint64_t> counts(bins, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const double i1 = model.sample(rng);
      const double r = ratio_r(i1, model.sample(rng));
      ++counts[std::min(bins - 1, static_cast<std::size_t>(r * bins))];
    }
    const double p = 1.0 / bins;
    const double se = std::sqrt(p * (1 - p) / n) * bins;  // on the density scale
    for (auto c : counts) {
      const double density = static_cast<double>(c) / n * bins;
      worst_z = std::max(worst_z, std::abs(density - 1.0) / se);
    }
  }
  out.pass = worst_pdf <= 1e-12 && worst_z <= 5.0;
  out.detail = "max |p_R - 1| = " + fmt(worst_pdf) + " (<= 1e-12), worst histogram bin " +
               fmt(worst_z) + " SE (<= 5)";
  return out;
}

Outcome uniform_closed_forms() {
  Outcome out;
  double worst = 0.0, worst_norm = 0.0;
  bool bounds = true;
  for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{1.0, 2.0}, std::pair{1.0, 5.0}}) {
    const RatioDistribution d(NullModel::uniform(a, b), RatioTransform::standard_r(),
                              EvaluationMode::ClosedForm);
    for (int k = 0; k < 500; ++k) {
      const double r = (k + 0.5) / 500.0;
      const double q = (1 - r) / r;
      const double pq = oracle_uniform_q_pdf(a, b, q);
      const double cq = oracle_uniform_q_cdf(a, b, q);
      worst = std::max({worst, std::abs(d.q_pdf(q) - pq), std::abs(d.q_cdf(q) - cq),
                        std::abs(d.r_pdf(r) - pq / (r * r)), std::abs(d.r_cdf(r) - (1.0 - cq))});
    }
    const double lo = a / (a + b), hi = b / (a + b);
    const double mass = simpson([&](double r) { return d.r_pdf(r); }, std::max(lo, 1e-15), 0.5, 200000) +
                        simpson([&](double r) { return d.r_pdf(r); }, 0.5, std::min(hi, 1.0 - 1e-15), 200000);
    worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
    bounds = bounds && d.support_lower() == lo && d.support_upper() == hi;
  }
  out.pass = worst <= 1e-6 && worst_norm <= 1e-9 && bounds;
  out.detail = "max deviation from oracles " + fmt(worst) + " (<= 1e-6), |int p_R - 1| = " +
               fmt(worst_norm) + " (<= 1e-9), support bounds " + (bounds ? "exact" : "NOT exact");
  return out;
}

Outcome normalization_constants() {
  Outcome out;
  const auto uni = NullModel::uniform(0, 1);
  const auto r = RatioTransform::standard_r();
  const RatioDistribution d(uni, r);
  const double on = bin_mass_analytic(d, 4.0 / 9.0, 0.5);
  const double off = bin_mass_analytic(d, 0.4, 4.0 / 9.0);
  const auto mc_on = mc_bin_mass(uni, r, 4.0 / 9.0, 0.5, 1'000'000, 303);
  const auto mc_off = mc_bin_mass(uni, r, 0.4, 4.0 / 9.0, 1'000'000, 304);
  const double z_on = std::abs(mc_on.mass - on) / mc_on.std_error;
  const double z_off = std::abs(mc_off.mass - off) / mc_off.std_error;
  const bool exact = std::abs(on - 0.1) <= 1e-12 && std::abs(off - 1.0 / 15.0) <= 1e-12;

  double worst_width = 0.0;
  std::vector<BinLayout> layouts{one_to_one_layout()};
  const IntegerRatio anchors[] = {{1, 2}, {1, 1}, {2, 1}, {1, 3}, {3, 1}};
  for (auto& l : thirds_layout(anchors)) layouts.push_back(l);
  for (const auto& layout : layouts) {
    const auto w = bin_normalizers(layout, Normalizer::analytic_mass(NullModel::exponential(1.0), r));
    for (std::size_t k = 0; k < layout.bin_count(); ++k) {
      worst_width = std::max(worst_width, std::abs(w.values[k] - layout.width(k)));
    }
  }
  out.pass = exact && z_on <= 4.0 && z_off <= 4.0 && worst_width <= 1e-12;
  out.detail = "on " + fmt(on) + ", off " + fmt(off) + (exact ? " (exact)" : " (WRONG)") +
               "; MC deviations " + fmt(z_on) + " / " + fmt(z_off) + " SE (<= 4); exponential mass vs width " +
               fmt(worst_width) + " (<= 1e-12)";
  return out;
}

ExperimentConfig desk_config(const NullModel& model, std::uint64_t seed) {
  ExperimentConfig c;
  c.model = model;
  c.n_sequences = 200;
  c.seq_len = 500;
  c.seed = seed;
  return c;
}

Outcome significance_pattern() {
  Outcome out;
  struct Row {
    const char* name;
    NullModel model;
    bool want_significant;
    int hits = 0;
    double mean_log10p = 0.0;
  };
  std::vector<Row> rows{{"uniform(0,1)", NullModel::uniform(0, 1), true},
                        {"halfnormal(1)", NullModel::half_normal(1.0), true},
                        {"exponential(1)", NullModel::exponential(1.0), false}};
  for (std::size_t m = 0; m < rows.size(); ++m) {
    for (int run = 0; run < 100; ++run) {
      const auto res = paired_experiment(desk_config(rows[m].model, derive_seed(4000 + m, run)));
      const bool ok = rows[m].want_significant ? res.report.log10_p < -6.0 : res.report.p_value > 0.01;
      rows[m].hits += ok;
      rows[m].mean_log10p += res.report.log10_p / 100.0;
    }
  }
  std::ostringstream s;
  for (const auto& row : rows) {
    const bool ok = row.hits >= 90;
    out.pass = out.pass && ok;
    s << row.name << (row.want_significant ? " p<1e-6 " : " p>0.01 ") << row.hits << "/100 (mean log10 p "
      << fmt(row.mean_log10p) << ")" << (ok ? "" : " [short of 90]") << "; ";
  }
  out.detail = s.str();
  out.detail.resize(out.detail.size() - 2);  // trailing "; "
  return out;
}

Outcome null_matched_pattern() {
  Outcome out;
  const auto uni = NullModel::uniform(0, 1);
  const auto shared = std::make_shared<const NullModel>(uni);
  const auto plus = RatioTransform::rescaled_plus(shared);

  // (a) pushforward uniformity of 10^5 within-sequence rescaled ratios.
  int ks_pass = 0;
  const double crit = 1.628 / std::sqrt(1e5);
  for (int run = 0; run < 100; ++run) {
    Rng rng(derive_seed(5001, run));
    const auto seq = sample_sequence(uni, 100001, rng);
    ks_pass += ks_uniform(sequence_ratios(seq, plus)) < crit;
  }
  int wil_rescaled = 0, wil_mass = 0;
  for (int run = 0; run < 100; ++run) {
    auto c = desk_config(uni, derive_seed(5002, run));
    c.transform = plus;
    wil_rescaled += paired_experiment(c).report.p_value >= 0.05;
    auto m = desk_config(uni, derive_seed(5003, run));
    m.normalizer = Normalizer::analytic_mass(uni, RatioTransform::standard_r());
    wil_mass += paired_experiment(m).report.p_value >= 0.05;
  }
  out.pass = ks_pass >= 95 && wil_rescaled >= 85 && wil_mass >= 85;
  out.detail = "(a) KS pass " + std::to_string(ks_pass) + "/100 (>= 95), rescaled Wilcoxon non-significant " +
               std::to_string(wil_rescaled) + "/100 (>= 85); (b) mass-normalized Wilcoxon non-significant " +
               std::to_string(wil_mass) + "/100 (>= 85)";
  return out;
}

Outcome scale_ratio_reduction() {
  Outcome out;
  const auto r = RatioTransform::standard_r();
  const RatioDistribution small(NullModel::uniform(0.01, 0.05), r);
  const RatioDistribution large(NullModel::uniform(3, 15), r);
  const RatioDistribution other(NullModel::uniform(0.01, 0.04), r);
  double same = 0.0, differ = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double x = (k + 0.5) / 500.0;
    same = std::max(same, std::abs(small.r_pdf(x) - large.r_pdf(x)));
    differ = std::max(differ, std::abs(small.r_pdf(x) - other.r_pdf(x)));
  }
  out.pass = same <= 1e-10 && differ > 1e-3;
  out.detail = "max |(0.01,0.05) - (3,15)| = " + fmt(same) + " (<= 1e-10), max |(0.01,0.05) - (0.01,0.04)| = " +
               fmt(differ) + " (> 1e-3)";
  return out;
}

Outcome wilcoxon_oracle() {
  Outcome out;
  std::vector<double> ranks8(8);
  std::iota(ranks8.begin(), ranks8.end(), 1.0);
  double worst_exact = 0.0;
  for (std::uint32_t mask = 0; mask < 256; ++mask) {
    std::vector<double> d;
    for (int k = 0; k < 8; ++k) d.push_back((mask >> k & 1u) ? ranks8[k] : -ranks8[k]);
    const auto rep = wilcoxon_signed_rank(d, WilcoxonPMethod::Exact);
    worst_exact = std::max(worst_exact, std::abs(rep.p_value - brute_force_wilcoxon_p(ranks8, rep.statistic)));
  }
  std::vector<double> ranks12(12);
  std::iota(ranks12.begin(), ranks12.end(), 1.0);
  double worst_normal = 0.0;
  for (double t = 0; t <= 39; t += 1) {
    worst_normal = std::max(worst_normal, std::abs(brute_force_wilcoxon_p(ranks12, t) -
                                                   wilcoxon_normal_p(12, 0.0, t).first));
  }
  out.pass = worst_exact <= 1e-12 && worst_normal <= 0.02;
  out.detail = "exact vs enumeration over 256 patterns " + fmt(worst_exact) + " (<= 1e-12), normal vs exact at n=12 " +
               fmt(worst_normal) + " (<= 0.02)";
  return out;
}

Outcome determinism() {
  Outcome out;
  const auto m = NullModel::half_normal(1.0);
  const auto r = RatioTransform::standard_r();
  const auto a = mc_bin_mass(m, r, 4.0 / 9.0, 5.0 / 9.0, 1'000'000, 808);
  const auto b = mc_bin_mass(m, r, 4.0 / 9.0, 5.0 / 9.0, 1'000'000, 808);
  const bool mc_same = a.hits == b.hits && a.mass == b.mass && a.std_error == b.std_error && a.seed == b.seed;

  const auto p1 = mc_bin_mass_parallel(m, r, 4.0 / 9.0, 5.0 / 9.0, 1'000'000, 809, 8, 1);
  const auto p4 = mc_bin_mass_parallel(m, r, 4.0 / 9.0, 5.0 / 9.0, 1'000'000, 809, 8, 4);
  const bool threads_same = p1.hits == p4.hits;
  const double z = std::abs(p1.mass - a.mass) / a.std_error;

  const auto seqs = simulate_sequences(NullModel::uniform(1, 3), 20, 200, 810);
  AnalysisConfig cfg;
  cfg.seed = 811;
  cfg.null_spec = "uniform:1,3";
  cfg.normalizer = "mass-mc:100000";
  const bool report_same = run_analysis(cfg, seqs).dump() == run_analysis(cfg, seqs).dump();

  out.pass = mc_same && threads_same && report_same && z <= 4.0;
  out.detail = std::string("McEstimate ") + (mc_same ? "bit-identical" : "DIFFERS") + ", report " +
               (report_same ? "byte-identical" : "DIFFERS") + ", parallel 1 vs 4 threads " +
               (threads_same ? "identical" : "DIFFER") + ", chunked vs single-stream " + fmt(z) + " SE (<= 4)";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "Poisson flatness", 10.0, poisson_flatness},
      {2, "uniform-interval closed forms", 60.0, uniform_closed_forms},
      {3, "normalization constants", 30.0, normalization_constants},
      {4, "1:1 significance pattern across null models", 300.0, significance_pattern},
      {5, "rescaling and model-mass normalization remove the uniform 1:1 effect", 300.0, null_matched_pattern},
      {6, "scale-ratio reduction", 10.0, scale_ratio_reduction},
      {7, "Wilcoxon oracle", 10.0, wilcoxon_oracle},
      {8, "Monte Carlo determinism and parallel consistency", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] criterion %d: %s -- %s; %.1f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
