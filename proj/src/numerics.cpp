#include "ratiokit/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <thread>

#include "ratiokit/errors.hpp"
#include "ratiokit/null_model.hpp"
#include "ratiokit/random.hpp"

namespace ratiokit {

namespace {

// Kronrod 15-point abscissae on [-1, 1] (non-negative half) with the
// embedded 7-point Gauss weights on the odd entries.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw DomainError("integrand is not finite on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options,
                                    std::span<const double> breakpoints) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("integration bounds must be finite with lo <= hi");
  }
  if (lo == hi) return {};
  if (!(options.abs_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");

  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Panel p = gauss_kronrod(f, cuts[k], cuts[k + 1]);
    value += p.value;
    error += p.error;
    panels.push(p);
  }

  while (error > options.abs_tol) {
    if (panels.size() >= options.max_panels) {
      throw ConvergenceError("adaptive quadrature exhausted its panel budget", value, error);
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Panel cannot be split further in double precision.
      throw ConvergenceError("adaptive quadrature reached machine resolution", value, error);
    }
    panels.pop();
    const Panel left = gauss_kronrod(f, worst.lo, mid);
    const Panel right = gauss_kronrod(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    if (error <= options.abs_tol) {
      // Re-sum to shed accumulated cancellation in the running totals.
      auto copy = panels;
      value = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {value, error, panels.size()};
}

double invert_monotone(const std::function<double(double)>& F, double target, double lo, double hi,
                       double tol) {
  if (!(lo < hi)) throw DomainError("inversion bracket must satisfy lo < hi");
  double flo = F(lo) - target;
  double fhi = F(hi) - target;
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw DomainError("target " + std::to_string(target) + " is outside the function's range");
  }
  int stale_side = 0;
  for (int iter = 0; iter < 400; ++iter) {
    // Illinois false position, falling back to bisection every third step.
    double x = (iter % 3 == 2) ? 0.5 * (lo + hi) : (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = F(x) - target;
    if (std::abs(fx) <= tol) return x;
    if ((fx > 0.0) == (fhi > 0.0)) {
      hi = x;
      fhi = fx;
      if (stale_side == -1) flo *= 0.5;
      stale_side = -1;
    } else {
      lo = x;
      flo = fx;
      if (stale_side == 1) fhi *= 0.5;
      stale_side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

void check_bin(const RatioTransform& transform, double u, double v) {
  if (!(u < v) || u < 0.0 || v > transform.codomain_upper()) {
    throw DomainError("bin [" + std::to_string(u) + ", " + std::to_string(v) +
                      "] is not a valid range of the transform's codomain");
  }
}

McEstimate finish(std::uint64_t hits, std::uint64_t n, std::uint64_t seed) {
  McEstimate est;
  est.n = n;
  est.hits = hits;
  est.seed = seed;
  est.mass = static_cast<double>(hits) / static_cast<double>(n);
  est.std_error = std::sqrt(est.mass * (1.0 - est.mass) / static_cast<double>(n));
  return est;
}

std::vector<std::uint64_t> count_hits(const NullModel& model, const RatioTransform& transform,
                                      std::span<const RatioBin> bins, std::uint64_t n,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> hits(bins.size(), 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    const double i1 = model.sample(rng);
    const double i2 = model.sample(rng);
    const double s = transform(i1, i2);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (bins[b].u <= s && s <= bins[b].v) ++hits[b];
    }
  }
  return hits;
}

}  // namespace

McEstimate mc_bin_mass(const NullModel& model, const RatioTransform& transform, double u, double v,
                       std::uint64_t n, std::uint64_t seed) {
  const RatioBin bin{u, v};
  return mc_bin_masses(model, transform, std::span(&bin, 1), n, seed).front();
}

std::vector<McEstimate> mc_bin_masses(const NullModel& model, const RatioTransform& transform,
                                      std::span<const RatioBin> bins, std::uint64_t n,
                                      std::uint64_t seed) {
  if (n == 0) throw DomainError("Monte Carlo sample count must be positive");
  for (const auto& b : bins) check_bin(transform, b.u, b.v);
  const auto hits = count_hits(model, transform, bins, n, seed);
  std::vector<McEstimate> out;
  out.reserve(bins.size());
  for (auto h : hits) out.push_back(finish(h, n, seed));
  return out;
}

McEstimate mc_bin_mass_parallel(const NullModel& model, const RatioTransform& transform, double u,
                                double v, std::uint64_t n, std::uint64_t seed, std::size_t chunks,
                                std::size_t threads) {
  if (n == 0) throw DomainError("Monte Carlo sample count must be positive");
  if (chunks == 0) throw DomainError("chunk count must be positive");
  check_bin(transform, u, v);
  chunks = std::min<std::uint64_t>(chunks, n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, chunks);

  const RatioBin bin{u, v};
  std::vector<std::uint64_t> chunk_hits(chunks, 0);
  auto run_chunk = [&](std::size_t c) {
    const std::uint64_t share = n / chunks + (c < n % chunks ? 1 : 0);
    chunk_hits[c] = count_hits(model, transform, std::span(&bin, 1), share, derive_seed(seed, c))[0];
  };
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += threads) run_chunk(c);
      });
    }
  }
  std::uint64_t hits = 0;
  for (auto h : chunk_hits) hits += h;
  return finish(hits, n, seed);
}

}  // namespace ratiokit
