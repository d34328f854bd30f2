#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratiokit/binning.hpp"
#include "ratiokit/hypothesis.hpp"
#include "ratiokit/null_model.hpp"
#include "ratiokit/ratio_core.hpp"

namespace ratiokit {

inline constexpr const char* kReportSchema = "ratiokit_report_v1";

enum class SequenceKind { Onsets, Intervals };

struct LoadOptions {
  /// Split a sequence wherever an interval exceeds this many seconds; the
  /// long interval itself is dropped. Pieces are named "<id>#<k>", k from 1.
  std::optional<double> max_gap;
};

struct LoadResult {
  std::vector<IntervalSequence> sequences;
  /// Sequences with fewer than 2 intervals (3 onsets), skipped.
  std::size_t skipped = 0;
};

/// Reads a long-format CSV with header `sequence_id,onset_s` or
/// `sequence_id,interval_s`. Errors carry the 1-based file line.
LoadResult load_sequences(const std::filesystem::path& path, SequenceKind kind,
                          const LoadOptions& options = {});
LoadResult load_sequences(std::istream& in, SequenceKind kind, const LoadOptions& options = {});

/// Writes sequences in the `sequence_id,interval_s` format with 17 significant digits.
void write_sequences(const std::filesystem::path& path, std::span<const IntervalSequence> sequences);
void write_sequences(std::ostream& out, std::span<const IntervalSequence> sequences);

/// Two-column CSV (duration_s, density), with or without a header row.
NullModel load_table_model(const std::filesystem::path& path);

/// `exponential:RATE`, `uniform:A,B`, `halfnormal:SIGMA` or `table:PATH`.
NullModel parse_null_spec(const std::string& spec);
/// `q`, `r`, `rescale-plus` or `rescale-minus`; the rescaled kinds need a model.
RatioTransform parse_transform(const std::string& spec, const std::optional<NullModel>& model);
/// `one-to-one`, `thirds:M:N,M:N,...` or `edges:E1,E2,...`.
std::vector<BinLayout> parse_layout(const std::string& spec);
/// `width`, `mass` or `mass-mc:N`; mass kinds need a model.
Normalizer parse_normalizer(const std::string& spec, const std::optional<NullModel>& model,
                            const RatioTransform& transform, std::uint64_t seed);

/// Writes sampled sequences from a model: sequence s uses derive_seed(seed, s).
std::vector<IntervalSequence> simulate_sequences(const NullModel& model, std::size_t n_sequences,
                                                 std::size_t seq_len, std::uint64_t seed);
void simulate_command(const NullModel& model, std::size_t n_sequences, std::size_t seq_len,
                      std::uint64_t seed, const std::filesystem::path& out_path);

enum class CurveAxis { Q, R, S };

struct DensityCurve {
  CurveAxis axis = CurveAxis::R;
  std::vector<double> x;
  std::vector<double> density;
  /// "closed-form", "quadrature" or "histogram".
  std::string provenance;
  std::size_t n_samples = 0;
  std::size_t n_bins = 0;
};

struct DensityCurveSet {
  DensityCurve analytic;
  DensityCurve histogram;
  std::string model;
  std::string transform;
};

/// Analytic density on a grid of grid_size points plus the distribution's
/// breakpoints, with cells bisected where the trapezoid rule is still coarse
/// (total trapezoid error around 2e-4), and a histogram of the ratios of one sampled sequence of
/// n_samples + 1 intervals. Throws DomainError for grid_size < 64.
DensityCurveSet emit_density_curves(const NullModel& model, const RatioTransform& transform,
                                    std::size_t grid_size, std::size_t n_samples = 100000,
                                    std::size_t n_bins = 100, std::uint64_t seed = 0);

/// Trapezoidal integral of a curve.
double trapezoid_mass(const DensityCurve& curve);

void write_curve_csv(const std::filesystem::path& path, const DensityCurve& curve);
nlohmann::ordered_json curve_metadata(const DensityCurve& curve);

struct AnalysisConfig {
  std::filesystem::path input;
  SequenceKind kind = SequenceKind::Intervals;
  std::string transform = "r";
  std::optional<std::string> null_spec;
  std::string layout = "one-to-one";
  std::string normalizer = "width";
  bool wilcoxon = true;
  bool ks = true;
  /// Compare the on bin against each off bin separately instead of combined.
  bool separate_off = false;
  bool include_ratios = false;
  LoadOptions load;
  std::optional<std::uint64_t> seed;
};

/// Full pipeline on in-memory sequences; returns the structured report.
nlohmann::ordered_json run_analysis(const AnalysisConfig& config,
                                    std::span<const IntervalSequence> sequences,
                                    std::size_t skipped = 0);
/// Loads config.input and runs the pipeline.
nlohmann::ordered_json run_analysis(const AnalysisConfig& config);

nlohmann::ordered_json to_json(const TestReport& report);

/// Seed used when none is given: drawn from std::random_device.
std::uint64_t fresh_seed();

}  // namespace ratiokit
