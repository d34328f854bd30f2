#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratiokit/null_model.hpp"
#include "ratiokit/numerics.hpp"
#include "ratiokit/ratio_core.hpp"

namespace ratiokit {

/// A small-integer ratio m:n between adjacent intervals, i_k : i_{k+1}.
struct IntegerRatio {
  int m = 1;
  int n = 1;

  /// Position on the r axis, m / (m + n).
  double r() const noexcept { return static_cast<double>(m) / (m + n); }
  std::string label() const { return std::to_string(m) + ":" + std::to_string(n); }
  friend bool operator==(const IntegerRatio&, const IntegerRatio&) = default;
};

enum class BinRole { OnRatio, OffRatio };

const char* to_string(BinRole role) noexcept;

/// Contiguous ratio-space bins around one integer-ratio anchor.
///
/// Bins are half-open [e_k, e_{k+1}) except the last, which is closed.
class BinLayout {
 public:
  /// Throws DomainError unless edges are strictly increasing inside (0, 1),
  /// roles has one entry per bin with at least one of each kind, and the
  /// anchor lies in an on-ratio bin.
  BinLayout(IntegerRatio anchor, std::vector<double> edges, std::vector<BinRole> roles,
            std::string convention);

  const IntegerRatio& anchor() const noexcept { return anchor_; }
  double anchor_r() const noexcept { return anchor_.r(); }
  const std::vector<double>& edges() const noexcept { return edges_; }
  const std::vector<BinRole>& roles() const noexcept { return roles_; }
  std::size_t bin_count() const noexcept { return roles_.size(); }
  RatioBin bin(std::size_t k) const { return {edges_[k], edges_[k + 1]}; }
  double width(std::size_t k) const { return edges_[k + 1] - edges_[k]; }
  /// How the edges were chosen ("one-to-one", "thirds" or "explicit").
  const std::string& convention() const noexcept { return convention_; }

  /// Bin index holding x, or nullopt when x falls outside the layout.
  std::optional<std::size_t> locate(double x) const noexcept;

 private:
  IntegerRatio anchor_;
  std::vector<double> edges_;
  std::vector<BinRole> roles_;
  std::string convention_;
};

/// The 1:1 layout: off [2/5, 4/9), on [4/9, 5/9), off [5/9, 3/5].
BinLayout one_to_one_layout();

/// One layout per anchor, ordered by anchor position. The gap to each
/// neighbouring anchor is cut in thirds: the third next to the anchor is
/// on-ratio, the middle third off-ratio. Outermost anchors mirror their
/// single inner gap.
std::vector<BinLayout> thirds_layout(std::span<const IntegerRatio> anchors);

/// Layout from explicit edges: first and last bins off-ratio, the rest on-ratio.
/// The anchor is reported as the on-zone's centre.
BinLayout explicit_layout(std::vector<double> edges);

/// Bin counts (raw stage) and, once normalized, m / (N * normalizer) per entry.
///
/// Entries start as the layout's bins; combine_off_bins merges them. Each
/// entry records which layout bins it covers so normalizers can be summed
/// over merged bins.
struct NormalizedCounts {
  std::vector<BinRole> roles;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::vector<double> normalizers;
  std::vector<double> values;

  bool normalized() const noexcept { return !values.empty(); }
  std::uint64_t counted() const noexcept;
};

/// Places ratios into the layout's bins. N counts every ratio, including
/// those outside the layout. Throws InputError for an empty list or a ratio
/// outside [0, 1].
NormalizedCounts count_bins(std::span<const double> ratios, const BinLayout& layout);

/// Sums raw counts entry-wise (pooling sequences); all inputs must share one shape.
NormalizedCounts pool_counts(std::span<const NormalizedCounts> parts);

enum class NormalizerKind { BinWidth, AnalyticMass, MonteCarloMass };

/// How expected bin occupancy is computed.
///
/// BinWidth assumes a flat ratio density. The mass kinds use the null
/// probability of each bin under (model, transform), either exactly or by
/// Monte Carlo with the given sample count and seed.
struct Normalizer {
  NormalizerKind kind = NormalizerKind::BinWidth;
  std::optional<NullModel> model;
  std::optional<RatioTransform> transform;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;

  static Normalizer width() { return {}; }
  static Normalizer analytic_mass(NullModel model, RatioTransform transform);
  static Normalizer monte_carlo_mass(NullModel model, RatioTransform transform,
                                     std::uint64_t samples, std::uint64_t seed);
  std::string describe() const;
};

/// Per-layout-bin normalizer values (and Monte Carlo standard errors when applicable).
struct BinNormalizers {
  std::vector<double> values;
  std::vector<double> std_errors;
};

BinNormalizers bin_normalizers(const BinLayout& layout, const Normalizer& normalizer);

/// Divides each entry's count by N times the sum of its members' normalizers.
/// Throws DomainError when an entry's normalizer is zero.
NormalizedCounts normalize_counts(NormalizedCounts counts, std::span<const double> bin_normalizers);
NormalizedCounts normalize_counts(NormalizedCounts counts, const BinLayout& layout,
                                  const Normalizer& normalizer);

/// Merges all off-ratio entries into one and all on-ratio entries into one
/// (order: on, off). Normalized inputs keep normalized outputs, with merged
/// normalizers summed. Throws InputError with fewer than 2 off-ratio entries.
NormalizedCounts combine_off_bins(const NormalizedCounts& counts);

}  // namespace ratiokit
