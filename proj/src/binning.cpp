#include "ratiokit/binning.hpp"

#include <algorithm>
#include <cmath>

#include "ratiokit/errors.hpp"
#include "text_util.hpp"

namespace ratiokit {

const char* to_string(BinRole role) noexcept {
  return role == BinRole::OnRatio ? "on" : "off";
}

BinLayout::BinLayout(IntegerRatio anchor, std::vector<double> edges, std::vector<BinRole> roles,
                     std::string convention)
    : anchor_(anchor), edges_(std::move(edges)), roles_(std::move(roles)),
      convention_(std::move(convention)) {
  if (anchor_.m <= 0 || anchor_.n <= 0) throw DomainError("anchor terms must be positive");
  if (edges_.size() < 3 || roles_.size() + 1 != edges_.size()) {
    throw DomainError("layout needs at least 2 bins and one role per bin");
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (!(edges_[k] > 0.0 && edges_[k] < 1.0)) {
      throw DomainError("layout edge " + detail::shortest(edges_[k]) + " is outside (0, 1)");
    }
    if (k > 0 && !(edges_[k] > edges_[k - 1])) {
      throw DomainError("layout edges must be strictly increasing");
    }
  }
  const auto on = std::count(roles_.begin(), roles_.end(), BinRole::OnRatio);
  if (on == 0 || on == static_cast<std::ptrdiff_t>(roles_.size())) {
    throw DomainError("layout needs at least one on-ratio and one off-ratio bin");
  }
  const auto where = locate(anchor_r());
  if (!where || roles_[*where] != BinRole::OnRatio) {
    throw DomainError("anchor " + anchor_.label() + " does not lie in an on-ratio bin");
  }
}

std::optional<std::size_t> BinLayout::locate(double x) const noexcept {
  if (x < edges_.front() || x > edges_.back()) return std::nullopt;
  if (x == edges_.back()) return roles_.size() - 1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

BinLayout one_to_one_layout() {
  return BinLayout({1, 1}, {2.0 / 5.0, 4.0 / 9.0, 5.0 / 9.0, 3.0 / 5.0},
                   {BinRole::OffRatio, BinRole::OnRatio, BinRole::OffRatio}, "one-to-one");
}

std::vector<BinLayout> thirds_layout(std::span<const IntegerRatio> anchors) {
  if (anchors.size() < 2) throw DomainError("thirds layout needs at least 2 anchors");
  std::vector<IntegerRatio> sorted(anchors.begin(), anchors.end());
  for (const auto& a : sorted) {
    if (a.m <= 0 || a.n <= 0) throw DomainError("anchor terms must be positive");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const IntegerRatio& x, const IntegerRatio& y) { return x.r() < y.r(); });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    // m:n and km:kn share a position; compare exactly via cross-multiplication.
    if (static_cast<long long>(sorted[k].m) * (sorted[k - 1].m + sorted[k - 1].n) ==
        static_cast<long long>(sorted[k - 1].m) * (sorted[k].m + sorted[k].n)) {
      throw DomainError("duplicate anchor " + sorted[k].label());
    }
  }
  std::vector<BinLayout> out;
  out.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double a = sorted[k].r();
    const double right_gap = k + 1 < sorted.size() ? sorted[k + 1].r() - a : a - sorted[k - 1].r();
    const double left_gap = k > 0 ? a - sorted[k - 1].r() : right_gap;
    out.emplace_back(sorted[k],
                     std::vector<double>{a - 2.0 * left_gap / 3.0, a - left_gap / 3.0,
                                         a + right_gap / 3.0, a + 2.0 * right_gap / 3.0},
                     std::vector<BinRole>{BinRole::OffRatio, BinRole::OnRatio, BinRole::OffRatio},
                     "thirds");
  }
  return out;
}

BinLayout explicit_layout(std::vector<double> edges) {
  if (edges.size() < 4) throw DomainError("explicit layout needs at least 4 edges (3 bins)");
  std::vector<BinRole> roles(edges.size() - 1, BinRole::OnRatio);
  roles.front() = BinRole::OffRatio;
  roles.back() = BinRole::OffRatio;
  const double on_lo = edges[1];
  const double on_hi = edges[edges.size() - 2];
  // Simplest integer ratio inside the on-zone.
  std::optional<IntegerRatio> anchor;
  for (int total = 2; total <= 40 && !anchor; ++total) {
    for (int m = 1; m < total; ++m) {
      const IntegerRatio cand{m, total - m};
      if (cand.r() >= on_lo && cand.r() < on_hi) {
        anchor = cand;
        break;
      }
    }
  }
  if (!anchor) throw DomainError("no small-integer ratio lies in the explicit on-zone");
  return BinLayout(*anchor, std::move(edges), std::move(roles), "explicit");
}

std::uint64_t NormalizedCounts::counted() const noexcept {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

NormalizedCounts count_bins(std::span<const double> ratios, const BinLayout& layout) {
  if (ratios.empty()) throw InputError("no ratios to count");
  NormalizedCounts out;
  out.roles = layout.roles();
  out.counts.assign(layout.bin_count(), 0);
  for (std::size_t k = 0; k < layout.bin_count(); ++k) out.members.push_back({k});
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    const double x = ratios[j];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InputError("ratio " + detail::shortest(x) + " at index " + std::to_string(j) +
                           " is outside [0, 1]",
                       j);
    }
    if (const auto k = layout.locate(x)) ++out.counts[*k];
  }
  out.total = ratios.size();
  return out;
}

NormalizedCounts pool_counts(std::span<const NormalizedCounts> parts) {
  if (parts.empty()) throw InputError("nothing to pool");
  NormalizedCounts out;
  out.roles = parts.front().roles;
  out.members = parts.front().members;
  out.counts.assign(out.roles.size(), 0);
  for (const auto& p : parts) {
    if (p.roles != out.roles || p.members != out.members) {
      throw InputError("cannot pool counts over different bin shapes");
    }
    for (std::size_t k = 0; k < p.counts.size(); ++k) out.counts[k] += p.counts[k];
    out.total += p.total;
  }
  return out;
}

Normalizer Normalizer::analytic_mass(NullModel model, RatioTransform transform) {
  Normalizer n;
  n.kind = NormalizerKind::AnalyticMass;
  n.model = std::move(model);
  n.transform = std::move(transform);
  return n;
}

Normalizer Normalizer::monte_carlo_mass(NullModel model, RatioTransform transform,
                                        std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("Monte Carlo normalizer needs a positive sample count");
  Normalizer n;
  n.kind = NormalizerKind::MonteCarloMass;
  n.model = std::move(model);
  n.transform = std::move(transform);
  n.mc_samples = samples;
  n.seed = seed;
  return n;
}

std::string Normalizer::describe() const {
  switch (kind) {
    case NormalizerKind::BinWidth:
      return "width";
    case NormalizerKind::AnalyticMass:
      return "mass[" + model->describe() + " / " + transform->describe() + "]";
    case NormalizerKind::MonteCarloMass:
      return "mass-mc[" + model->describe() + " / " + transform->describe() +
             ", n=" + std::to_string(mc_samples) + ", seed=" + std::to_string(seed) + "]";
  }
  return "?";
}

BinNormalizers bin_normalizers(const BinLayout& layout, const Normalizer& normalizer) {
  BinNormalizers out;
  const std::size_t k_bins = layout.bin_count();
  switch (normalizer.kind) {
    case NormalizerKind::BinWidth:
      for (std::size_t k = 0; k < k_bins; ++k) out.values.push_back(layout.width(k));
      break;
    case NormalizerKind::AnalyticMass: {
      if (!normalizer.model || !normalizer.transform) {
        throw InputError("model-mass normalizer requires a null model");
      }
      const RatioDistribution dist(*normalizer.model, *normalizer.transform);
      for (std::size_t k = 0; k < k_bins; ++k) {
        const auto b = layout.bin(k);
        out.values.push_back(bin_mass_analytic(dist, b.u, b.v));
      }
      break;
    }
    case NormalizerKind::MonteCarloMass: {
      if (!normalizer.model || !normalizer.transform) {
        throw InputError("model-mass normalizer requires a null model");
      }
      std::vector<RatioBin> bins;
      for (std::size_t k = 0; k < k_bins; ++k) bins.push_back(layout.bin(k));
      const auto est = mc_bin_masses(*normalizer.model, *normalizer.transform, bins,
                                     normalizer.mc_samples, normalizer.seed);
      for (const auto& e : est) {
        out.values.push_back(e.mass);
        out.std_errors.push_back(e.std_error);
      }
      break;
    }
  }
  return out;
}

NormalizedCounts normalize_counts(NormalizedCounts counts, std::span<const double> bin_normalizers) {
  if (counts.total == 0) throw InputError("cannot normalize counts with N = 0");
  counts.normalizers.assign(counts.counts.size(), 0.0);
  counts.values.assign(counts.counts.size(), 0.0);
  for (std::size_t e = 0; e < counts.counts.size(); ++e) {
    double w = 0.0;
    for (auto k : counts.members[e]) {
      if (k >= bin_normalizers.size()) throw DomainError("normalizer list is shorter than the layout");
      w += bin_normalizers[k];
    }
    if (!(w > 0.0)) {
      throw DomainError("bin normalizer is zero; the null assigns no mass to entry " +
                        std::to_string(e));
    }
    counts.normalizers[e] = w;
    counts.values[e] = static_cast<double>(counts.counts[e]) / (static_cast<double>(counts.total) * w);
  }
  return counts;
}

NormalizedCounts normalize_counts(NormalizedCounts counts, const BinLayout& layout,
                                  const Normalizer& normalizer) {
  const auto w = bin_normalizers(layout, normalizer);
  return normalize_counts(std::move(counts), w.values);
}

NormalizedCounts combine_off_bins(const NormalizedCounts& counts) {
  const auto off = std::count(counts.roles.begin(), counts.roles.end(), BinRole::OffRatio);
  if (off < 2) throw InputError("combining needs at least 2 off-ratio bins");
  NormalizedCounts out;
  out.total = counts.total;
  out.roles = {BinRole::OnRatio, BinRole::OffRatio};
  out.members.assign(2, {});
  out.counts.assign(2, 0);
  std::vector<double> w(2, 0.0);
  for (std::size_t e = 0; e < counts.counts.size(); ++e) {
    const std::size_t slot = counts.roles[e] == BinRole::OnRatio ? 0 : 1;
    out.counts[slot] += counts.counts[e];
    out.members[slot].insert(out.members[slot].end(), counts.members[e].begin(),
                             counts.members[e].end());
    if (counts.normalized()) w[slot] += counts.normalizers[e];
  }
  if (counts.normalized()) {
    out.normalizers = w;
    out.values.resize(2);
    for (std::size_t s = 0; s < 2; ++s) {
      out.values[s] = static_cast<double>(out.counts[s]) / (static_cast<double>(out.total) * w[s]);
    }
  }
  return out;
}

}  // namespace ratiokit
