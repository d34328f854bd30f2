#include "ratiokit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "ratiokit/errors.hpp"
#include "ratiokit/experiment.hpp"
#include "ratiokit/hypothesis.hpp"
#include "ratiokit/random.hpp"
#include "text_util.hpp"

namespace ratiokit {

using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double require_double(const std::string& s, const std::string& what) {
  const auto v = parse_double(s);
  if (!v) throw InputError("cannot parse " + what + " '" + s + "'");
  return *v;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

struct RawSequence {
  std::string id;
  std::vector<double> values;
  std::vector<std::size_t> lines;
};

// Cuts intervals at gaps longer than max_gap.
void emit_sequence(const std::string& id, const std::vector<double>& intervals,
                   const LoadOptions& options, LoadResult& out) {
  std::vector<std::vector<double>> pieces(1);
  for (double iv : intervals) {
    if (options.max_gap && iv > *options.max_gap) {
      if (!pieces.back().empty()) pieces.emplace_back();
    } else {
      pieces.back().push_back(iv);
    }
  }
  if (pieces.size() > 1 && pieces.back().empty()) pieces.pop_back();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (pieces[k].size() < 2) {
      ++out.skipped;
      continue;
    }
    const std::string name = pieces.size() == 1 ? id : id + "#" + std::to_string(k + 1);
    out.sequences.emplace_back(std::move(pieces[k]), name);
  }
}

void finish_sequence(const RawSequence& raw, SequenceKind kind, const LoadOptions& options,
                     LoadResult& out) {
  std::vector<double> intervals;
  if (kind == SequenceKind::Onsets) {
    for (std::size_t k = 1; k < raw.values.size(); ++k) {
      if (!(raw.values[k] > raw.values[k - 1])) {
        throw InputError("line " + std::to_string(raw.lines[k]) + ": onsets of sequence '" + raw.id +
                             "' are not strictly increasing",
                         raw.lines[k]);
      }
      intervals.push_back(raw.values[k] - raw.values[k - 1]);
    }
  } else {
    intervals = raw.values;
  }
  emit_sequence(raw.id, intervals, options, out);
}

}  // namespace

LoadResult load_sequences(std::istream& in, SequenceKind kind, const LoadOptions& options) {
  const std::string value_column = kind == SequenceKind::Onsets ? "onset_s" : "interval_s";
  LoadResult out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::optional<RawSequence> current;
  std::map<std::string, bool> finished;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "sequence_id" || fields[1] != value_column) {
        throw InputError("line " + std::to_string(line_no) + ": expected header 'sequence_id," +
                             value_column + "'",
                         line_no);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw InputError("line " + std::to_string(line_no) + ": expected 2 fields", line_no);
    }
    const auto value = parse_double(fields[1]);
    if (!value || !std::isfinite(*value)) {
      throw InputError("line " + std::to_string(line_no) + ": malformed number '" + fields[1] + "'",
                       line_no);
    }
    if (kind == SequenceKind::Intervals && !(*value > 0.0)) {
      throw InputError("line " + std::to_string(line_no) + ": interval must be positive", line_no);
    }
    if (!current || current->id != fields[0]) {
      if (finished.count(fields[0])) {
        throw InputError("line " + std::to_string(line_no) + ": rows of sequence '" + fields[0] +
                             "' are not contiguous",
                         line_no);
      }
      if (current) {
        finished[current->id] = true;
        finish_sequence(*current, kind, options, out);
      }
      current = RawSequence{fields[0], {}, {}};
    }
    current->values.push_back(*value);
    current->lines.push_back(line_no);
  }
  if (current) finish_sequence(*current, kind, options, out);
  if (out.sequences.empty()) throw InputError("no sequences");
  return out;
}

LoadResult load_sequences(const std::filesystem::path& path, SequenceKind kind,
                          const LoadOptions& options) {
  auto in = open_input(path);
  return load_sequences(in, kind, options);
}

void write_sequences(std::ostream& out, std::span<const IntervalSequence> sequences) {
  out << "sequence_id,interval_s\n";
  for (const auto& seq : sequences) {
    for (double iv : seq.intervals()) out << seq.source_id() << ',' << detail::digits17(iv) << '\n';
  }
}

void write_sequences(const std::filesystem::path& path, std::span<const IntervalSequence> sequences) {
  auto out = open_output(path);
  write_sequences(out, sequences);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

NullModel load_table_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<double> x, d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) {
      throw InputError("table line " + std::to_string(line_no) + ": expected 2 fields", line_no);
    }
    const auto a = parse_double(fields[0]);
    const auto b = parse_double(fields[1]);
    if (!a || !b) {
      if (x.empty() && line_no == 1) continue;  // header row
      throw InputError("table line " + std::to_string(line_no) + ": malformed number", line_no);
    }
    x.push_back(*a);
    d.push_back(*b);
  }
  return NullModel::tabulated(std::move(x), std::move(d));
}

NullModel parse_null_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("null model spec '" + spec + "' lacks ':'");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (kind == "table") return load_table_model(args);
  const auto parts = split(args, ',');
  if (kind == "exponential" && parts.size() == 1) {
    return NullModel::exponential(require_double(parts[0], "rate"));
  }
  if (kind == "uniform" && parts.size() == 2) {
    return NullModel::uniform(require_double(parts[0], "lower bound"),
                              require_double(parts[1], "upper bound"));
  }
  if (kind == "halfnormal" && parts.size() == 1) {
    return NullModel::half_normal(require_double(parts[0], "scale"));
  }
  throw InputError("unrecognized null model spec '" + spec + "'");
}

RatioTransform parse_transform(const std::string& spec, const std::optional<NullModel>& model) {
  if (spec == "q") return RatioTransform::fraction_q();
  if (spec == "r") return RatioTransform::standard_r();
  if (spec == "rescale-plus" || spec == "rescale-minus") {
    if (!model) throw InputError("transform '" + spec + "' requires --null");
    auto shared = std::make_shared<const NullModel>(*model);
    return spec == "rescale-plus" ? RatioTransform::rescaled_plus(shared)
                                  : RatioTransform::rescaled_minus(shared);
  }
  throw InputError("unrecognized transform '" + spec + "'");
}

std::vector<BinLayout> parse_layout(const std::string& spec) {
  if (spec == "one-to-one") return {one_to_one_layout()};
  if (spec.rfind("thirds:", 0) == 0) {
    std::vector<IntegerRatio> anchors;
    for (const auto& item : split(spec.substr(7), ',')) {
      const auto terms = split(item, ':');
      const auto m = terms.size() == 2 ? parse_u64(terms[0]) : std::nullopt;
      const auto n = terms.size() == 2 ? parse_u64(terms[1]) : std::nullopt;
      if (!m || !n || *m == 0 || *n == 0 || *m > 1000 || *n > 1000) {
        throw InputError("malformed anchor '" + item + "'");
      }
      anchors.push_back({static_cast<int>(*m), static_cast<int>(*n)});
    }
    return thirds_layout(anchors);
  }
  if (spec.rfind("edges:", 0) == 0) {
    std::vector<double> edges;
    for (const auto& item : split(spec.substr(6), ',')) edges.push_back(require_double(item, "edge"));
    return {explicit_layout(std::move(edges))};
  }
  throw InputError("unrecognized layout '" + spec + "'");
}

Normalizer parse_normalizer(const std::string& spec, const std::optional<NullModel>& model,
                            const RatioTransform& transform, std::uint64_t seed) {
  if (spec == "width") return Normalizer::width();
  if (spec == "mass" || spec.rfind("mass-mc", 0) == 0) {
    if (!model) throw InputError("normalizer '" + spec + "' requires --null");
    if (spec == "mass") return Normalizer::analytic_mass(*model, transform);
    std::uint64_t n = 1'000'000;
    if (spec != "mass-mc") {
      if (spec.rfind("mass-mc:", 0) != 0) throw InputError("unrecognized normalizer '" + spec + "'");
      const auto parsed = parse_u64(spec.substr(8));
      if (!parsed || *parsed == 0) throw InputError("malformed sample count in '" + spec + "'");
      n = *parsed;
    }
    return Normalizer::monte_carlo_mass(*model, transform, n, seed);
  }
  throw InputError("unrecognized normalizer '" + spec + "'");
}

std::vector<IntervalSequence> simulate_sequences(const NullModel& model, std::size_t n_sequences,
                                                 std::size_t seq_len, std::uint64_t seed) {
  if (n_sequences == 0) throw InputError("need at least one sequence");
  std::vector<IntervalSequence> out;
  out.reserve(n_sequences);
  for (std::size_t s = 0; s < n_sequences; ++s) {
    Rng rng(derive_seed(seed, s));
    auto seq = sample_sequence(model, seq_len, rng);
    const auto iv = seq.intervals();
    out.emplace_back(std::vector<double>(iv.begin(), iv.end()), "s" + std::to_string(s));
  }
  return out;
}

void simulate_command(const NullModel& model, std::size_t n_sequences, std::size_t seq_len,
                      std::uint64_t seed, const std::filesystem::path& out_path) {
  const auto seqs = simulate_sequences(model, n_sequences, seq_len, seed);
  write_sequences(out_path, seqs);
}

// ---------------------------------------------------------------- curves

namespace {

CurveAxis axis_of(const RatioTransform& t) {
  switch (t.kind()) {
    case TransformKind::FractionQ:
      return CurveAxis::Q;
    case TransformKind::StandardR:
      return CurveAxis::R;
    default:
      return CurveAxis::S;
  }
}

const char* axis_name(CurveAxis a) {
  return a == CurveAxis::Q ? "q" : a == CurveAxis::R ? "r" : "s";
}

}  // namespace

namespace {

// Splits grid cells where one trapezoid differs from two half-width ones,
// until the summed estimate is small or the point budget is spent. Keeps
// coarse base grids honest in the tails and around sharp peaks.
void refine_curve(DensityCurve& curve, const std::vector<double>& grid,
                  const std::function<double(double)>& pdf) {
  constexpr double kTarget = 2e-4;
  const std::size_t budget = 64 * grid.size();
  std::vector<double> x = grid;
  std::vector<double> f;
  for (double v : x) f.push_back(pdf(v));
  for (int pass = 0; pass < 40 && x.size() < budget; ++pass) {
    std::vector<double> mids, fm, err;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double m = 0.5 * (x[k] + x[k + 1]);
      const double v = pdf(m);
      const double e = 0.25 * (x[k + 1] - x[k]) * std::abs(f[k] + f[k + 1] - 2.0 * v);
      mids.push_back(m);
      fm.push_back(v);
      err.push_back(e);
      total += e;
    }
    if (total <= kTarget) break;
    const double cut = kTarget / static_cast<double>(err.size());
    std::vector<double> nx{x[0]}, nf{f[0]};
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      if (err[k] > cut && mids[k] > x[k] && mids[k] < x[k + 1]) {
        nx.push_back(mids[k]);
        nf.push_back(fm[k]);
      }
      nx.push_back(x[k + 1]);
      nf.push_back(f[k + 1]);
    }
    if (nx.size() == x.size()) break;
    x = std::move(nx);
    f = std::move(nf);
  }
  curve.x = std::move(x);
  curve.density = std::move(f);
}

}  // namespace

DensityCurveSet emit_density_curves(const NullModel& model, const RatioTransform& transform,
                                    std::size_t grid_size, std::size_t n_samples,
                                    std::size_t n_bins, std::uint64_t seed) {
  if (grid_size < 64) throw DomainError("density curves need a grid of at least 64 points");
  if (n_bins == 0 || n_samples == 0) throw DomainError("histogram needs samples and bins");
  const RatioDistribution dist(model, transform);
  DensityCurveSet out;
  out.model = model.describe();
  out.transform = transform.describe();

  const CurveAxis axis = axis_of(transform);
  constexpr double eps = 1e-9;
  std::vector<double> grid;
  double hist_hi = 1.0;
  if (axis == CurveAxis::Q) {
    // Equal steps in u = q / (1 + q) up to the 0.9999 quantile.
    const double q_top = std::isfinite(dist.support_upper())
                             ? dist.support_upper()
                             : model.q_cdf_inverse(0.9999);
    const double u_top = q_top / (1.0 + q_top);
    for (std::size_t k = 0; k < grid_size; ++k) {
      const double u = eps + (u_top - eps) * static_cast<double>(k) / (grid_size - 1);
      grid.push_back(u / (1.0 - u));
    }
    hist_hi = q_top;
  } else {
    for (std::size_t k = 0; k < grid_size; ++k) {
      grid.push_back(eps + (1.0 - 2.0 * eps) * static_cast<double>(k) / (grid_size - 1));
    }
  }
  const double grid_lo = grid.front(), grid_hi = grid.back();
  for (double b : dist.breakpoints()) {
    if (b > grid_lo && b < grid_hi) grid.push_back(b);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  out.analytic.axis = axis;
  out.analytic.provenance = dist.mode() == EvaluationMode::ClosedForm ? "closed-form" : "quadrature";
  refine_curve(out.analytic, grid, [&](double x) { return dist.pdf(x); });

  Rng rng(seed);
  const auto seq = sample_sequence(model, n_samples + 1, rng);
  const auto ratios = sequence_ratios(seq, transform);
  std::vector<std::uint64_t> counts(n_bins, 0);
  const double width = hist_hi / static_cast<double>(n_bins);
  for (double s : ratios) {
    if (s < 0.0 || s > hist_hi) continue;
    const auto k = std::min(n_bins - 1, static_cast<std::size_t>(s / width));
    ++counts[k];
  }
  out.histogram.axis = axis;
  out.histogram.provenance = "histogram";
  out.histogram.n_samples = ratios.size();
  out.histogram.n_bins = n_bins;
  for (std::size_t k = 0; k < n_bins; ++k) {
    out.histogram.x.push_back((static_cast<double>(k) + 0.5) * width);
    out.histogram.density.push_back(static_cast<double>(counts[k]) /
                                    (static_cast<double>(ratios.size()) * width));
  }
  return out;
}

double trapezoid_mass(const DensityCurve& curve) {
  double m = 0.0;
  for (std::size_t k = 1; k < curve.x.size(); ++k) {
    m += 0.5 * (curve.density[k] + curve.density[k - 1]) * (curve.x[k] - curve.x[k - 1]);
  }
  return m;
}

void write_curve_csv(const std::filesystem::path& path, const DensityCurve& curve) {
  auto out = open_output(path);
  out << "x,density\n";
  for (std::size_t k = 0; k < curve.x.size(); ++k) {
    out << detail::digits17(curve.x[k]) << ',' << detail::digits17(curve.density[k]) << '\n';
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

ordered_json curve_metadata(const DensityCurve& curve) {
  ordered_json j;
  j["axis"] = axis_name(curve.axis);
  j["provenance"] = curve.provenance;
  j["points"] = curve.x.size();
  if (curve.provenance == "histogram") {
    j["n_samples"] = curve.n_samples;
    j["n_bins"] = curve.n_bins;
  } else {
    j["trapezoid_mass"] = trapezoid_mass(curve);
  }
  return j;
}

// -------------------------------------------------------------- analysis

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ordered_json to_json(const TestReport& report) {
  ordered_json j;
  j["method"] = to_string(report.method);
  j["statistic"] = report.statistic;
  j["n_effective"] = report.n_effective;
  j["p_value"] = report.p_value;
  j["log10_p"] = report.log10_p;
  j["p_method"] = report.p_method;
  if (report.method == TestMethod::WilcoxonSignedRank) {
    j["w_plus"] = report.w_plus;
    j["w_minus"] = report.w_minus;
    j["dropped_zero"] = report.dropped_zero;
  }
  if (report.seed) j["seed"] = *report.seed;
  if (!report.metadata.empty()) {
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : report.metadata) meta[k] = v;
    j["metadata"] = meta;
  }
  return j;
}

namespace {

ordered_json counts_json(const NormalizedCounts& c) {
  ordered_json j;
  std::vector<std::string> roles;
  for (auto r : c.roles) roles.emplace_back(to_string(r));
  j["roles"] = roles;
  j["counts"] = c.counts;
  j["N"] = c.total;
  if (c.normalized()) {
    j["normalizers"] = c.normalizers;
    j["normalized"] = c.values;
  }
  return j;
}

std::string kind_name(SequenceKind k) { return k == SequenceKind::Onsets ? "onsets" : "intervals"; }

}  // namespace

ordered_json run_analysis(const AnalysisConfig& config, std::span<const IntervalSequence> sequences,
                          std::size_t skipped) {
  if (sequences.empty()) throw InputError("no sequences");
  const std::uint64_t seed = config.seed ? *config.seed : fresh_seed();

  std::optional<NullModel> model;
  if (config.null_spec) model = parse_null_spec(*config.null_spec);
  const RatioTransform transform = parse_transform(config.transform, model);
  if (!transform.unit_codomain()) {
    throw InputError("bin analysis needs a transform with values in (0, 1); got '" +
                     config.transform + "'");
  }
  const auto layouts = parse_layout(config.layout);
  const Normalizer normalizer =
      parse_normalizer(config.normalizer, model, transform, derive_seed(seed, 0));

  ordered_json report;
  report["schema"] = kReportSchema;
  ordered_json cfg;
  cfg["input"] = config.input.string();
  cfg["kind"] = kind_name(config.kind);
  cfg["transform"] = transform.describe();
  cfg["null_model"] = model ? ordered_json(model->describe()) : ordered_json(nullptr);
  if (model && !model->has_closed_form()) cfg["quadrature_truncation_s"] = model->truncation_upper();
  cfg["layout"] = config.layout;
  cfg["normalizer"] = normalizer.describe();
  cfg["separate_off"] = config.separate_off;
  if (config.load.max_gap) cfg["max_gap_s"] = *config.load.max_gap;
  cfg["seed"] = seed;
  report["config"] = cfg;

  std::vector<std::vector<double>> ratios;
  ratios.reserve(sequences.size());
  ordered_json seq_json = ordered_json::array();
  for (const auto& seq : sequences) {
    try {
      ratios.push_back(sequence_ratios(seq, transform));
    } catch (const std::exception& e) {
      throw InputError("sequence '" + seq.source_id() + "' (ratios): " + e.what());
    }
    ordered_json sj;
    sj["id"] = seq.source_id();
    sj["n_intervals"] = seq.size();
    if (config.include_ratios) sj["ratios"] = ratios.back();
    seq_json.push_back(sj);
  }
  report["sequences"] = seq_json;
  report["skipped_sequences"] = skipped;

  ordered_json layouts_json = ordered_json::array();
  for (const auto& layout : layouts) {
    ordered_json lj;
    lj["anchor"] = layout.anchor().label();
    lj["anchor_r"] = layout.anchor_r();
    lj["convention"] = layout.convention();
    lj["edges"] = layout.edges();
    std::vector<std::string> roles;
    for (auto r : layout.roles()) roles.emplace_back(to_string(r));
    lj["roles"] = roles;

    BinNormalizers norm;
    try {
      norm = bin_normalizers(layout, normalizer);
    } catch (const ConvergenceError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError("layout " + layout.anchor().label() + " (normalizers): " + e.what());
    }
    ordered_json nj;
    nj["method"] = normalizer.describe();
    nj["per_bin"] = norm.values;
    if (!norm.std_errors.empty()) nj["mc_std_errors"] = norm.std_errors;
    lj["normalizer"] = nj;

    std::vector<NormalizedCounts> per_seq;
    ordered_json per_seq_json = ordered_json::array();
    std::vector<std::pair<double, double>> on_off;
    std::vector<std::vector<std::pair<double, double>>> on_each_off;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
      NormalizedCounts c;
      try {
        c = normalize_counts(count_bins(ratios[s], layout), norm.values);
      } catch (const std::exception& e) {
        throw InputError("sequence '" + sequences[s].source_id() + "', layout " +
                         layout.anchor().label() + " (normalization): " + e.what());
      }
      const auto merged = combine_off_bins(c);
      on_off.emplace_back(merged.values[0], merged.values[1]);
      if (config.separate_off) {
        std::size_t off_index = 0;
        for (std::size_t e = 0; e < c.roles.size(); ++e) {
          if (c.roles[e] != BinRole::OffRatio) continue;
          if (on_each_off.size() <= off_index) on_each_off.emplace_back();
          on_each_off[off_index++].emplace_back(merged.values[0], c.values[e]);
        }
      }
      ordered_json cj = counts_json(c);
      cj["id"] = sequences[s].source_id();
      cj["combined"] = counts_json(merged);
      per_seq_json.push_back(cj);
      per_seq.push_back(std::move(c));
    }
    const auto pooled = normalize_counts(pool_counts(per_seq), norm.values);
    lj["pooled"] = counts_json(pooled);
    lj["pooled_combined"] = counts_json(combine_off_bins(pooled));
    lj["per_sequence"] = per_seq_json;

    ordered_json tests = ordered_json::array();
    if (config.wilcoxon) {
      auto add = [&](const std::vector<std::pair<double, double>>& pairs, const std::string& label) {
        try {
          TestReport rep = wilcoxon_signed_rank(pairs);
          rep.seed = seed;
          rep.metadata = {{"comparison", label},
                          {"anchor", layout.anchor().label()},
                          {"layout", layout.convention()},
                          {"normalizer", normalizer.describe()},
                          {"null_model", model ? model->describe() : "none"}};
          tests.push_back(to_json(rep));
        } catch (const InputError& e) {
          ordered_json skipped_test;
          skipped_test["method"] = to_string(TestMethod::WilcoxonSignedRank);
          skipped_test["comparison"] = label;
          skipped_test["skipped"] = e.what();
          tests.push_back(skipped_test);
        }
      };
      if (config.separate_off) {
        for (std::size_t k = 0; k < on_each_off.size(); ++k) {
          add(on_each_off[k], "on vs off[" + std::to_string(k) + "]");
        }
      } else {
        add(on_off, "on vs combined off");
      }
    }
    lj["tests"] = tests;
    layouts_json.push_back(lj);
  }
  report["layouts"] = layouts_json;

  if (config.ks && model) {
    std::vector<double> pooled;
    for (const auto& r : ratios) pooled.insert(pooled.end(), r.begin(), r.end());
    const RatioDistribution dist(*model, transform);
    TestReport rep = ks_test(pooled, [&](double x) { return dist.cdf(x); });
    rep.seed = seed;
    rep.metadata = {{"null_model", model->describe()}, {"transform", transform.describe()}};
    report["ks"] = to_json(rep);
  }
  return report;
}

ordered_json run_analysis(const AnalysisConfig& config) {
  const auto loaded = load_sequences(config.input, config.kind, config.load);
  return run_analysis(config, loaded.sequences, loaded.skipped);
}

}  // namespace ratiokit
