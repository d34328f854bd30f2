#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ratiokit/binning.hpp"
#include "ratiokit/hypothesis.hpp"
#include "ratiokit/null_model.hpp"

namespace ratiokit {

/// Per-sequence (on, off) normalized values; off bins are combined unless
/// the counts already have the combined [on, off] shape.
std::pair<double, double> on_off_values(const NormalizedCounts& normalized);

struct ExperimentConfig {
  NullModel model = NullModel::exponential(1.0);
  RatioTransform transform = RatioTransform::standard_r();
  BinLayout layout = one_to_one_layout();
  Normalizer normalizer = Normalizer::width();
  std::size_t n_sequences = 1000;
  std::size_t seq_len = 1000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  std::size_t threads = 1;
};

struct ExperimentResult {
  TestReport report;
  std::vector<std::pair<double, double>> on_off;
  BinNormalizers normalizers;
};

/// Simulates n_sequences i.i.d. sequences from the model (sequence s seeded by
/// derive_seed(seed, s)), bins each sequence's ratios, normalizes, combines
/// the off bins and runs a Wilcoxon signed-rank test of on vs off across
/// sequences.
ExperimentResult paired_experiment(const ExperimentConfig& config);

}  // namespace ratiokit
