#include "ratiokit/null_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "ratiokit/errors.hpp"
#include "ratiokit/numerics.hpp"
#include "text_util.hpp"

namespace ratiokit {

namespace detail {

// P_Q sampled on u = q / (1 + q) in [0, 1] and linearly interpolated.
struct QCdfTable {
  static constexpr std::size_t kIntervals = 4096;
  std::once_flag built;
  std::vector<double> values;
};

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-10;

double half_normal_upper(double sigma) { return 12.0 * sigma; }

// P(i2 <= q i1) = int p(t) F(q t) dt, evaluated numerically.
double q_cdf_by_quadrature(const NullModel& m, double q) {
  // For q > 1 the integrand F(q t) switches on within t ~ 1/q; the reflection
  // P_Q(q) = 1 - P_Q(1/q) of i.i.d. pairs keeps it as wide as p itself.
  if (q > 1.0) return 1.0 - q_cdf_by_quadrature(m, 1.0 / q);
  const double lo_support = m.support_lower();
  const double t_max = m.truncation_upper();
  const double lo = std::max(lo_support, lo_support / q);
  if (!(lo < t_max)) return 0.0;
  std::vector<double> cuts = m.breakpoints();
  const std::size_t base = cuts.size();
  for (std::size_t k = 0; k < base; ++k) cuts.push_back(cuts[k] / q);
  const auto r = integrate_adaptive([&](double t) { return m.pdf(t) * m.cdf(q * t); }, lo, t_max,
                                    {kQuadTol, 4000 + 4 * cuts.size()}, cuts);
  return std::clamp(r.value, 0.0, 1.0);
}

// p_Q(q) = int t p(t) p(q t) dt, evaluated numerically.
double q_pdf_by_quadrature(const NullModel& m, double q) {
  if (q > 1.0) return q_pdf_by_quadrature(m, 1.0 / q) / (q * q);
  const double lo_support = m.support_lower();
  const double t_max = m.truncation_upper();
  const double lo = std::max(lo_support, lo_support / q);
  const double hi = std::min(t_max, t_max / q);
  if (!(lo < hi)) return 0.0;
  std::vector<double> cuts = m.breakpoints();
  const std::size_t base = cuts.size();
  for (std::size_t k = 0; k < base; ++k) cuts.push_back(cuts[k] / q);
  const auto r = integrate_adaptive([&](double t) { return t * m.pdf(t) * m.pdf(q * t); }, lo, hi,
                                    {kQuadTol, 4000 + 4 * cuts.size()}, cuts);
  return std::max(r.value, 0.0);
}

// Exact uniform-interval ratio formulas; a == 0 is allowed.
namespace uniform_exact {

double q_pdf(double a, double b, double q) {
  const double d = 2.0 * (b - a) * (b - a);
  if (q * b < a || q * a > b) return 0.0;
  if (q <= 1.0) return (b * b - (a / q) * (a / q)) / d;
  return ((b / q) * (b / q) - a * a) / d;
}

double q_cdf(double a, double b, double q) {
  const double d = 2.0 * (b - a) * (b - a);
  if (q * b <= a) return 0.0;
  if (q * a >= b) return 1.0;
  double p;
  if (q <= 1.0) {
    p = (q * b * b + a * a / q - 2.0 * a * b) / d;
  } else {
    p = 1.0 - (b * b / q + q * a * a - 2.0 * a * b) / d;
  }
  return std::clamp(p, 0.0, 1.0);
}

double r_pdf(double a, double b, double r) {
  const double d = 2.0 * (b - a) * (b - a);
  if (r <= a / (a + b) || r >= b / (a + b)) return 0.0;  // density is continuous, zero at the edges
  double p;
  if (r <= 0.5) {
    p = (b / (1.0 - r)) * (b / (1.0 - r)) - (a / r) * (a / r);
  } else {
    p = (b / r) * (b / r) - (a / (1.0 - r)) * (a / (1.0 - r));
  }
  return std::max(p / d, 0.0);
}

double r_cdf(double a, double b, double r) {
  const double d = 2.0 * (b - a) * (b - a);
  const double s2 = (a + b) * (a + b);
  if (r <= a / (a + b)) return 0.0;
  if (r >= b / (a + b)) return 1.0;
  double p;
  if (r <= 0.5) {
    p = (b * b / (1.0 - r) + a * a / r - s2) / d;
  } else {
    p = 1.0 - (b * b / r + a * a / (1.0 - r) - s2) / d;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace uniform_exact

void require_q(double q) {
  if (!(q > 0.0) || std::isnan(q)) throw DomainError("q must be positive, got " + detail::shortest(q));
}

void require_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0, 1), got " + detail::shortest(r));
}

}  // namespace

// ---------------------------------------------------------------- NullModel

NullModel NullModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
  NullModel m;
  m.kind_ = ModelKind::Exponential;
  m.p0_ = rate;
  return m;
}

NullModel NullModel::uniform(double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) {
    throw DomainError("uniform model needs 0 <= a < b");
  }
  NullModel m;
  m.kind_ = ModelKind::Uniform;
  m.p0_ = a;
  m.p1_ = b;
  return m;
}

NullModel NullModel::half_normal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("half-normal scale must be positive");
  NullModel m;
  m.kind_ = ModelKind::HalfNormal;
  m.p0_ = sigma;
  m.table_ = std::make_shared<detail::QCdfTable>();
  return m;
}

NullModel NullModel::tabulated(std::vector<double> durations, std::vector<double> densities) {
  if (durations.size() != densities.size()) {
    throw InputError("tabulated model needs one density per duration");
  }
  if (durations.size() < 8) throw InputError("tabulated model needs at least 8 rows");
  for (std::size_t k = 0; k < durations.size(); ++k) {
    if (!std::isfinite(durations[k]) || durations[k] < 0.0) {
      throw InputError("tabulated duration must be finite and non-negative", k);
    }
    if (k > 0 && !(durations[k] > durations[k - 1])) {
      throw InputError("tabulated durations must be strictly increasing", k);
    }
    if (!std::isfinite(densities[k]) || densities[k] < 0.0) {
      throw InputError("tabulated density must be finite and non-negative", k);
    }
  }
  std::vector<double> cumulative(durations.size(), 0.0);
  for (std::size_t k = 1; k < durations.size(); ++k) {
    cumulative[k] = cumulative[k - 1] +
                    0.5 * (densities[k] + densities[k - 1]) * (durations[k] - durations[k - 1]);
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw InputError("tabulated density has zero mass");
  for (auto& d : densities) d /= total;
  for (auto& c : cumulative) c /= total;
  cumulative.back() = 1.0;

  NullModel m;
  m.kind_ = ModelKind::Tabulated;
  m.p0_ = durations.front();
  m.p1_ = durations.back();
  m.grid_ = std::move(durations);
  m.density_ = std::move(densities);
  m.cumulative_ = std::move(cumulative);
  m.table_ = std::make_shared<detail::QCdfTable>();
  return m;
}

double NullModel::shape_ratio() const noexcept {
  if (kind_ != ModelKind::Uniform) return std::numeric_limits<double>::quiet_NaN();
  return p0_ > 0.0 ? p1_ / p0_ : kInf;
}

double NullModel::pdf(double i) const {
  if (!(i >= 0.0)) throw DomainError("interval density is defined for i >= 0");
  switch (kind_) {
    case ModelKind::Exponential:
      return p0_ * std::exp(-p0_ * i);
    case ModelKind::Uniform:
      return (i >= p0_ && i <= p1_) ? 1.0 / (p1_ - p0_) : 0.0;
    case ModelKind::HalfNormal: {
      const double z = i / p0_;
      return std::sqrt(2.0 / std::numbers::pi) / p0_ * std::exp(-0.5 * z * z);
    }
    case ModelKind::Tabulated: {
      if (i < grid_.front() || i > grid_.back()) return 0.0;
      auto it = std::upper_bound(grid_.begin(), grid_.end(), i);
      if (it == grid_.end()) return density_.back();
      const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
      const double w = (i - grid_[k]) / (grid_[k + 1] - grid_[k]);
      return density_[k] + w * (density_[k + 1] - density_[k]);
    }
  }
  return 0.0;
}

double NullModel::cdf(double i) const {
  if (!(i > 0.0)) return 0.0;
  switch (kind_) {
    case ModelKind::Exponential:
      return -std::expm1(-p0_ * i);
    case ModelKind::Uniform:
      return std::clamp((i - p0_) / (p1_ - p0_), 0.0, 1.0);
    case ModelKind::HalfNormal:
      return std::erf(i / (p0_ * std::numbers::sqrt2));
    case ModelKind::Tabulated: {
      if (i <= grid_.front()) return 0.0;
      if (i >= grid_.back()) return 1.0;
      auto it = std::upper_bound(grid_.begin(), grid_.end(), i);
      const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
      const double dx = i - grid_[k];
      const double slope = (density_[k + 1] - density_[k]) / (grid_[k + 1] - grid_[k]);
      return std::min(1.0, cumulative_[k] + density_[k] * dx + 0.5 * slope * dx * dx);
    }
  }
  return 0.0;
}

double NullModel::sample(Rng& rng) const {
  switch (kind_) {
    case ModelKind::Exponential: {
      std::exponential_distribution<double> dist(p0_);
      double x;
      do x = dist(rng); while (!(x > 0.0));
      return x;
    }
    case ModelKind::Uniform: {
      std::uniform_real_distribution<double> dist(p0_, p1_);
      double x;
      do x = dist(rng); while (!(x > 0.0));
      return x;
    }
    case ModelKind::HalfNormal: {
      std::normal_distribution<double> dist(0.0, p0_);
      double x;
      do x = std::abs(dist(rng)); while (!(x > 0.0));
      return x;
    }
    case ModelKind::Tabulated: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (;;) {
        const double p = unit(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), p);
        if (it == cumulative_.end()) continue;
        const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        // Solve cum[k] + f_k dx + slope dx^2 / 2 = p within segment k.
        const double h = grid_[k + 1] - grid_[k];
        const double slope = (density_[k + 1] - density_[k]) / h;
        const double need = p - cumulative_[k];
        double dx;
        if (std::abs(slope) * h < 1e-12 * std::max(density_[k], 1e-300)) {
          dx = density_[k] > 0.0 ? need / density_[k] : 0.0;
        } else {
          const double disc = std::max(0.0, density_[k] * density_[k] + 2.0 * slope * need);
          // Stable root of slope/2 dx^2 + f_k dx - need = 0.
          dx = 2.0 * need / (density_[k] + std::sqrt(disc));
        }
        const double x = grid_[k] + std::clamp(dx, 0.0, h);
        if (x > 0.0) return x;
      }
    }
  }
  return 1.0;
}

double NullModel::support_lower() const noexcept { return bounded() ? p0_ : 0.0; }

double NullModel::truncation_upper() const noexcept {
  switch (kind_) {
    case ModelKind::Exponential:
      return 40.0 / p0_;
    case ModelKind::Uniform:
    case ModelKind::Tabulated:
      return p1_;
    case ModelKind::HalfNormal:
      return half_normal_upper(p0_);
  }
  return kInf;
}

std::vector<double> NullModel::breakpoints() const {
  switch (kind_) {
    case ModelKind::Exponential:
    case ModelKind::HalfNormal:
      return {0.0};
    case ModelKind::Uniform:
      return {p0_, p1_};
    case ModelKind::Tabulated:
      return grid_;
  }
  return {};
}

const detail::QCdfTable& NullModel::table() const {
  std::call_once(table_->built, [this] {
    constexpr std::size_t n = detail::QCdfTable::kIntervals;
    auto& v = table_->values;
    v.assign(n + 1, 0.0);
    v[n] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double u = static_cast<double>(k) / n;
      v[k] = q_cdf_by_quadrature(*this, u / (1.0 - u));
    }
    // Running maximum keeps the table monotone despite quadrature noise.
    for (std::size_t k = 1; k <= n; ++k) v[k] = std::max(v[k], v[k - 1]);
  });
  return *table_;
}

double NullModel::q_cdf(double q) const {
  require_q(q);
  switch (kind_) {
    case ModelKind::Exponential:
      return q / (1.0 + q);
    case ModelKind::Uniform:
      return uniform_exact::q_cdf(p0_, p1_, q);
    case ModelKind::HalfNormal:
    case ModelKind::Tabulated: {
      if (std::isinf(q)) return 1.0;
      const auto& v = table().values;
      const double n = static_cast<double>(detail::QCdfTable::kIntervals);
      const double pos = q / (1.0 + q) * n;
      const auto k = std::min(static_cast<std::size_t>(pos), detail::QCdfTable::kIntervals - 1);
      const double w = pos - static_cast<double>(k);
      return v[k] + w * (v[k + 1] - v[k]);
    }
  }
  return 0.0;
}

double NullModel::q_cdf_inverse(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1)");
  switch (kind_) {
    case ModelKind::Exponential:
      return p / (1.0 - p);
    case ModelKind::Uniform: {
      // Search over u = q / (1 + q) so the bracket is finite.
      const double u = invert_monotone(
          [this](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : q_cdf(x / (1.0 - x)); }, p,
          0.0, 1.0, 1e-14);
      return u / (1.0 - u);
    }
    case ModelKind::HalfNormal:
    case ModelKind::Tabulated: {
      const auto& v = table().values;
      auto it = std::lower_bound(v.begin(), v.end(), p);
      const auto k = static_cast<std::size_t>(it - v.begin());
      const double n = static_cast<double>(detail::QCdfTable::kIntervals);
      const double u = (static_cast<double>(k) - (v[k] - p) / (v[k] - v[k - 1])) / n;
      return u / (1.0 - u);
    }
  }
  return 0.0;
}

std::string NullModel::describe() const {
  switch (kind_) {
    case ModelKind::Exponential:
      return "exponential:" + detail::shortest(p0_);
    case ModelKind::Uniform:
      return "uniform:" + detail::shortest(p0_) + "," + detail::shortest(p1_);
    case ModelKind::HalfNormal:
      return "halfnormal:" + detail::shortest(p0_);
    case ModelKind::Tabulated:
      return "table[" + std::to_string(grid_.size()) + " rows on " + detail::shortest(p0_) + ".." +
             detail::shortest(p1_) + "]";
  }
  return "?";
}

bool operator==(const NullModel& a, const NullModel& b) noexcept {
  return a.kind_ == b.kind_ && a.p0_ == b.p0_ && a.p1_ == b.p1_ && a.grid_ == b.grid_ &&
         a.density_ == b.density_;
}

// -------------------------------------------------------- RatioDistribution

RatioDistribution::RatioDistribution(NullModel model, RatioTransform transform,
                                     std::optional<EvaluationMode> mode)
    : model_(std::move(model)), transform_(std::move(transform)) {
  if (mode) {
    if (*mode == EvaluationMode::ClosedForm && !model_.has_closed_form()) {
      throw DomainError("no closed-form ratio distribution for " + model_.describe());
    }
    mode_ = *mode;
  } else {
    mode_ = model_.has_closed_form() ? EvaluationMode::ClosedForm : EvaluationMode::Quadrature;
  }
}

double RatioDistribution::q_pdf_quadrature(double q) const { return q_pdf_by_quadrature(model_, q); }
double RatioDistribution::q_cdf_quadrature(double q) const { return q_cdf_by_quadrature(model_, q); }

double RatioDistribution::q_pdf(double q) const {
  require_q(q);
  if (mode_ == EvaluationMode::Quadrature) return q_pdf_quadrature(q);
  if (model_.kind() == ModelKind::Exponential) return 1.0 / ((1.0 + q) * (1.0 + q));
  return uniform_exact::q_pdf(model_.lower(), model_.upper(), q);
}

double RatioDistribution::q_cdf(double q) const {
  require_q(q);
  if (mode_ == EvaluationMode::Quadrature) return std::isinf(q) ? 1.0 : q_cdf_quadrature(q);
  return model_.q_cdf(q);
}

double RatioDistribution::r_pdf(double r) const {
  require_r(r);
  if (mode_ == EvaluationMode::ClosedForm) {
    if (model_.kind() == ModelKind::Exponential) return 1.0;
    return uniform_exact::r_pdf(model_.lower(), model_.upper(), r);
  }
  return q_pdf_quadrature((1.0 - r) / r) / (r * r);
}

double RatioDistribution::r_cdf(double r) const {
  require_r(r);
  if (mode_ == EvaluationMode::ClosedForm) {
    if (model_.kind() == ModelKind::Exponential) return r;
    return uniform_exact::r_cdf(model_.lower(), model_.upper(), r);
  }
  return 1.0 - q_cdf_quadrature((1.0 - r) / r);
}

double RatioDistribution::pdf(double x) const {
  switch (transform_.kind()) {
    case TransformKind::FractionQ:
      return q_pdf(x);
    case TransformKind::StandardR:
      return r_pdf(x);
    case TransformKind::RescaledPlus:
    case TransformKind::RescaledMinus: {
      if (!(x > 0.0 && x < 1.0)) throw DomainError("rescaled ratio must lie in (0, 1)");
      const NullModel& target = *transform_.model();
      if (target == model_) return 1.0;
      const double q = transform_.to_q(x);
      const double target_density = RatioDistribution(target, RatioTransform::fraction_q()).q_pdf(q);
      return target_density > 0.0 ? q_pdf(q) / target_density : 0.0;
    }
  }
  return 0.0;
}

double RatioDistribution::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("ratio is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= transform_.codomain_upper()) return 1.0;
  switch (transform_.kind()) {
    case TransformKind::FractionQ:
      return q_cdf(x);
    case TransformKind::StandardR:
      return r_cdf(x);
    case TransformKind::RescaledPlus:
    case TransformKind::RescaledMinus: {
      if (*transform_.model() == model_) return x;
      const double q = transform_.to_q(x);
      const double p = q_cdf(q);
      return transform_.kind() == TransformKind::RescaledPlus ? p : 1.0 - p;
    }
  }
  return 0.0;
}

double RatioDistribution::mass(double u, double v) const {
  if (!(u < v) || u < 0.0 || v > transform_.codomain_upper()) {
    throw DomainError("bin [" + detail::shortest(u) + ", " + detail::shortest(v) +
                      "] is not a valid range on the " + transform_.describe() + " axis");
  }
  return std::max(0.0, cdf(v) - cdf(u));
}

double RatioDistribution::support_lower() const {
  const bool positive_floor = model_.bounded() && model_.support_lower() > 0.0;
  const double lo = model_.support_lower();
  const double hi = model_.truncation_upper();
  switch (transform_.kind()) {
    case TransformKind::FractionQ:
      return positive_floor ? lo / hi : 0.0;
    case TransformKind::StandardR:
      return positive_floor ? lo / (lo + hi) : 0.0;
    default:
      return 0.0;
  }
}

double RatioDistribution::support_upper() const {
  const bool positive_floor = model_.bounded() && model_.support_lower() > 0.0;
  const double lo = model_.support_lower();
  const double hi = model_.truncation_upper();
  switch (transform_.kind()) {
    case TransformKind::FractionQ:
      return positive_floor ? hi / lo : kInf;
    case TransformKind::StandardR:
      return positive_floor ? hi / (lo + hi) : 1.0;
    default:
      return 1.0;
  }
}

std::vector<double> RatioDistribution::breakpoints() const {
  std::vector<double> out{transform_.from_q(1.0)};
  if (model_.bounded() && model_.support_lower() > 0.0) {
    if (transform_.kind() == TransformKind::StandardR || transform_.kind() == TransformKind::FractionQ) {
      out.push_back(support_lower());
      out.push_back(support_upper());
    } else {
      out.push_back(transform_.from_q(model_.support_lower() / model_.truncation_upper()));
      out.push_back(transform_.from_q(model_.truncation_upper() / model_.support_lower()));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string RatioDistribution::describe() const {
  std::string mode = mode_ == EvaluationMode::ClosedForm ? "closed-form" : "quadrature";
  return model_.describe() + " / " + transform_.describe() + " / " + mode;
}

// ------------------------------------------------------------ free functions

double interval_pdf(const NullModel& model, double i) { return model.pdf(i); }
double ratio_q_pdf(const RatioDistribution& dist, double q) { return dist.q_pdf(q); }
double ratio_q_cdf(const RatioDistribution& dist, double q) { return dist.q_cdf(q); }
double ratio_r_pdf(const RatioDistribution& dist, double r) { return dist.r_pdf(r); }
double ratio_r_cdf(const RatioDistribution& dist, double r) { return dist.r_cdf(r); }

double rescale_plus(const NullModel& model, double q) { return model.q_cdf(q); }

double rescale_minus(const NullModel& model, double q) {
  require_q(q);
  if (model.kind() == ModelKind::Exponential) return 1.0 / (1.0 + q);
  return 1.0 - model.q_cdf(q);
}

double bin_mass_analytic(const RatioDistribution& dist, double u, double v) {
  return dist.mass(u, v);
}

IntervalSequence sample_sequence(const NullModel& model, std::size_t n, Rng& rng) {
  if (n < 2) throw DomainError("a sampled sequence needs at least 2 intervals");
  std::vector<double> out(n);
  for (auto& x : out) x = model.sample(rng);
  return IntervalSequence(std::move(out), "sim");
}

}  // namespace ratiokit
