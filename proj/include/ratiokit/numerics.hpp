#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ratiokit/ratio_core.hpp"

namespace ratiokit {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t panels_used = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-8;
  std::size_t max_panels = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi].
///
/// Panels are bisected worst-first until the summed error estimate drops
/// below abs_tol. `breakpoints` inside (lo, hi) seed the initial panel
/// boundaries so that kinks and jumps of piecewise integrands never sit
/// inside a panel. Throws ConvergenceError (carrying the best estimate)
/// when max_panels is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options = {},
                                    std::span<const double> breakpoints = {});

inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                           double hi, double tol) {
  return integrate_adaptive(f, lo, hi, QuadratureOptions{tol, QuadratureOptions{}.max_panels});
}

/// Solves F(x) = target for monotone F on [lo, hi] by bracketed bisection
/// with an Illinois-style secant step. Returns x with |F(x) - target| <= tol,
/// or the bracket midpoint once the bracket collapses to machine precision.
/// Throws DomainError when target lies outside [F(lo), F(hi)].
double invert_monotone(const std::function<double(double)>& F, double target, double lo, double hi,
                       double tol = 1e-12);

/// Monte Carlo estimate of the null mass in a ratio bin.
struct McEstimate {
  double mass = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

struct RatioBin {
  double u;
  double v;
};

/// Draws n independent interval pairs from the model, maps each through the
/// transform and counts hits in the closed bin [u, v]. Returns hits / n with
/// the binomial standard error sqrt(p (1 - p) / n).
McEstimate mc_bin_mass(const NullModel& model, const RatioTransform& transform, double u, double v,
                       std::uint64_t n, std::uint64_t seed);

/// One sample stream shared by all bins; hit counts for overlapping or
/// adjacent bins therefore come from the same draws.
std::vector<McEstimate> mc_bin_masses(const NullModel& model, const RatioTransform& transform,
                                      std::span<const RatioBin> bins, std::uint64_t n,
                                      std::uint64_t seed);

/// Splits n into `chunks` streams seeded by derive_seed(seed, chunk) and runs
/// them on up to `threads` workers; hit counts are summed. The result depends
/// on (seed, chunks) only, never on the thread count.
McEstimate mc_bin_mass_parallel(const NullModel& model, const RatioTransform& transform, double u,
                                double v, std::uint64_t n, std::uint64_t seed,
                                std::size_t chunks, std::size_t threads = 0);

}  // namespace ratiokit
