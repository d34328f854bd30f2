#include "ratiokit/experiment.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "ratiokit/errors.hpp"
#include "ratiokit/random.hpp"

namespace ratiokit {

std::pair<double, double> on_off_values(const NormalizedCounts& normalized) {
  if (!normalized.normalized()) throw InputError("counts must be normalized first");
  if (normalized.roles == std::vector<BinRole>{BinRole::OnRatio, BinRole::OffRatio}) {
    return {normalized.values[0], normalized.values[1]};
  }
  const NormalizedCounts merged = combine_off_bins(normalized);
  return {merged.values[0], merged.values[1]};
}

ExperimentResult paired_experiment(const ExperimentConfig& config) {
  if (config.n_sequences < 5) throw InputError("paired experiment needs at least 5 sequences");
  if (config.seq_len < 3) throw InputError("paired experiment needs sequences of at least 3 intervals");

  ExperimentResult result;
  result.normalizers = bin_normalizers(config.layout, config.normalizer);
  result.on_off.resize(config.n_sequences);

  auto run = [&](std::size_t s) {
    Rng rng(derive_seed(config.seed, s));
    const auto seq = sample_sequence(config.model, config.seq_len, rng);
    const auto ratios = sequence_ratios(seq, config.transform);
    auto counts = normalize_counts(count_bins(ratios, config.layout), result.normalizers.values);
    result.on_off[s] = on_off_values(counts);
  };

  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : config.threads;
  threads = std::min(threads, config.n_sequences);
  if (threads <= 1) {
    for (std::size_t s = 0; s < config.n_sequences; ++s) run(s);
  } else {
    std::vector<std::exception_ptr> failures(threads);
    {
      std::vector<std::jthread> workers;
      for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (std::size_t s = w; s < config.n_sequences; s += threads) run(s);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  result.report = wilcoxon_signed_rank(result.on_off);
  result.report.seed = config.seed;
  result.report.metadata = {
      {"null_model", config.model.describe()},
      {"transform", config.transform.describe()},
      {"anchor", config.layout.anchor().label()},
      {"layout", config.layout.convention()},
      {"normalizer", config.normalizer.describe()},
      {"n_sequences", std::to_string(config.n_sequences)},
      {"seq_len", std::to_string(config.seq_len)},
  };
  return result;
}

}  // namespace ratiokit
