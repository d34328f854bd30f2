#pragma once

// Test-only oracles, deliberately independent of the library's numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace ratiokit::testing {

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Simpson over consecutive pieces [cuts[k], cuts[k+1]].
inline double simpson_pieces(const std::function<double(double)>& f, std::vector<double> cuts,
                             int n = 4000) {
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] > cuts[k]) s += simpson(f, cuts[k], cuts[k + 1], n);
  }
  return s;
}

// One-sample KS distance of values against the uniform(0, 1) CDF.
inline double ks_uniform_distance(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std::clamp(x[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic alpha = 0.01 critical value of the one-sample KS statistic.
inline double ks_critical_001(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace ratiokit::testing
