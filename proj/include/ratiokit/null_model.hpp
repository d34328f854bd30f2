#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ratiokit/random.hpp"
#include "ratiokit/ratio_core.hpp"

namespace ratiokit {

enum class ModelKind { Exponential, Uniform, HalfNormal, Tabulated };

namespace detail {
struct QCdfTable;
}

/// An i.i.d. interval-duration distribution used as a null hypothesis.
///
/// Values are cheap to copy: parameters are stored inline, and the lazily
/// built P_Q lookup table used by rescale_plus/rescale_minus for models
/// without a closed form is shared between copies. All members are safe to
/// call concurrently.
class NullModel {
 public:
  /// Density rate * exp(-rate * i); the inter-event law of a Poisson process.
  static NullModel exponential(double rate);
  /// Density 1 / (b - a) on [a, b]; requires 0 <= a < b.
  static NullModel uniform(double a, double b);
  /// Density sqrt(2/pi) / sigma * exp(-i^2 / (2 sigma^2)) on [0, inf).
  static NullModel half_normal(double sigma);
  /// Piecewise-linear density through (duration, density) points, renormalized
  /// to unit mass. Needs >= 8 strictly increasing, non-negative durations.
  static NullModel tabulated(std::vector<double> durations, std::vector<double> densities);

  ModelKind kind() const noexcept { return kind_; }

  // Parameter accessors; meaningless for other kinds.
  double rate() const noexcept { return p0_; }
  double lower() const noexcept { return p0_; }
  double upper() const noexcept { return p1_; }
  double sigma() const noexcept { return p0_; }
  /// b / a for Uniform (infinite when a == 0); the only shape parameter of
  /// the uniform ratio distributions.
  double shape_ratio() const noexcept;
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& grid_density() const noexcept { return density_; }

  /// Interval density. Throws DomainError for i < 0.
  double pdf(double i) const;
  /// Interval CDF, 0 for i <= 0.
  double cdf(double i) const;
  /// One interval draw; never returns 0.
  double sample(Rng& rng) const;

  double support_lower() const noexcept;
  /// Finite upper end used to truncate integrals over unbounded supports;
  /// the mass above it is below 1e-10.
  double truncation_upper() const noexcept;
  bool bounded() const noexcept { return kind_ == ModelKind::Uniform || kind_ == ModelKind::Tabulated; }
  /// Points where the density is not smooth (support edges, table knots).
  std::vector<double> breakpoints() const;

  /// True for models whose ratio distributions have exact formulas (Exponential, Uniform).
  bool has_closed_form() const noexcept {
    return kind_ == ModelKind::Exponential || kind_ == ModelKind::Uniform;
  }

  /// P_Q(q) = P(i2 <= q i1). Closed form when available, otherwise the
  /// cached monotone lookup table.
  double q_cdf(double q) const;
  /// Inverse of q_cdf on (0, 1).
  double q_cdf_inverse(double p) const;

  std::string describe() const;

  friend bool operator==(const NullModel& a, const NullModel& b) noexcept;

 private:
  NullModel() = default;
  const detail::QCdfTable& table() const;

  ModelKind kind_ = ModelKind::Exponential;
  double p0_ = 1.0;
  double p1_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cumulative_;
  std::shared_ptr<detail::QCdfTable> table_;
};

enum class EvaluationMode { ClosedForm, Quadrature };

/// The distribution of a ratio transform applied to i.i.d. pairs drawn from a null model.
///
/// Closed-form mode uses the exact Exponential and Uniform formulas; quadrature
/// mode evaluates p_Q(q) = int t p(t) p(q t) dt and P_Q(q) = int p(t) F(q t) dt
/// numerically for any model. The r-space quantities follow from
/// p_R(r) = p_Q((1 - r) / r) / r^2 and P_R(r) = 1 - P_Q((1 - r) / r).
class RatioDistribution {
 public:
  /// Mode defaults to closed form when the model has one. Requesting
  /// ClosedForm for a model without one throws DomainError.
  RatioDistribution(NullModel model, RatioTransform transform,
                    std::optional<EvaluationMode> mode = std::nullopt);

  const NullModel& model() const noexcept { return model_; }
  const RatioTransform& transform() const noexcept { return transform_; }
  EvaluationMode mode() const noexcept { return mode_; }

  double q_pdf(double q) const;
  double q_cdf(double q) const;
  double r_pdf(double r) const;
  double r_cdf(double r) const;

  /// Density along the transform's own axis (q, r or s).
  double pdf(double x) const;
  /// CDF along the transform's own axis; accepts the closed codomain.
  double cdf(double x) const;
  /// cdf(v) - cdf(u).
  double mass(double u, double v) const;

  /// Lower and upper ends of the support on the transform axis.
  double support_lower() const;
  double support_upper() const;
  /// Non-smooth points of pdf on the transform axis (support edges, the q = 1 kink).
  std::vector<double> breakpoints() const;

  std::string describe() const;

 private:
  double q_pdf_quadrature(double q) const;
  double q_cdf_quadrature(double q) const;

  NullModel model_;
  RatioTransform transform_;
  EvaluationMode mode_;
};

double interval_pdf(const NullModel& model, double i);
double ratio_q_pdf(const RatioDistribution& dist, double q);
double ratio_q_cdf(const RatioDistribution& dist, double q);
double ratio_r_pdf(const RatioDistribution& dist, double r);
double ratio_r_cdf(const RatioDistribution& dist, double r);

/// f+(q) = P_Q(q): maps q to a value that is uniform on (0, 1) under the model.
double rescale_plus(const NullModel& model, double q);
/// f-(q) = 1 - P_Q(q); for the exponential model this is exactly 1 / (1 + q).
double rescale_minus(const NullModel& model, double q);

/// Null probability of the ratio bin [u, v] on the distribution's axis.
double bin_mass_analytic(const RatioDistribution& dist, double u, double v);

/// n i.i.d. draws from the model.
IntervalSequence sample_sequence(const NullModel& model, std::size_t n, Rng& rng);

}  // namespace ratiokit
