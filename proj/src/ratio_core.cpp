#include "ratiokit/ratio_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ratiokit/errors.hpp"
#include "ratiokit/null_model.hpp"

namespace ratiokit {

namespace {

void require_positive_pair(double i1, double i2) {
  if (!(i1 > 0.0) || !(i2 > 0.0) || !std::isfinite(i1) || !std::isfinite(i2)) {
    throw DomainError("interval durations must be finite and positive");
  }
}

}  // namespace

IntervalSequence::IntervalSequence(std::vector<double> intervals, std::string source_id)
    : intervals_(std::move(intervals)), source_id_(std::move(source_id)) {
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (!(intervals_[k] > 0.0) || !std::isfinite(intervals_[k])) {
      throw InputError("interval " + std::to_string(k) + " is not a positive duration", k);
    }
  }
}

OnsetSequence::OnsetSequence(std::vector<double> onsets, std::string source_id)
    : onsets_(std::move(onsets)), source_id_(std::move(source_id)) {
  for (std::size_t k = 0; k < onsets_.size(); ++k) {
    if (!std::isfinite(onsets_[k])) {
      throw InputError("onset " + std::to_string(k) + " is not finite", k);
    }
    if (k > 0 && !(onsets_[k] > onsets_[k - 1])) {
      throw InputError("onsets not strictly increasing at index " + std::to_string(k), k);
    }
  }
}

IntervalSequence intervals_from_onsets(const OnsetSequence& onsets) {
  const auto t = onsets.onsets();
  if (t.size() < 3) {
    throw InputError("need at least 3 onsets to form an interval pair, got " +
                     std::to_string(t.size()));
  }
  std::vector<double> intervals(t.size() - 1);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) intervals[k] = t[k + 1] - t[k];
  return IntervalSequence(std::move(intervals), onsets.source_id());
}

double ratio_q(double i1, double i2) {
  require_positive_pair(i1, i2);
  return i2 / i1;
}

double ratio_r(double i1, double i2) {
  require_positive_pair(i1, i2);
  return i1 / (i1 + i2);
}

RatioTransform RatioTransform::fraction_q() { return {TransformKind::FractionQ, nullptr}; }
RatioTransform RatioTransform::standard_r() { return {TransformKind::StandardR, nullptr}; }

RatioTransform RatioTransform::rescaled_plus(std::shared_ptr<const NullModel> model) {
  if (!model) throw DomainError("rescaled transform needs a null model");
  return {TransformKind::RescaledPlus, std::move(model)};
}

RatioTransform RatioTransform::rescaled_minus(std::shared_ptr<const NullModel> model) {
  if (!model) throw DomainError("rescaled transform needs a null model");
  return {TransformKind::RescaledMinus, std::move(model)};
}

double RatioTransform::codomain_upper() const noexcept {
  return kind_ == TransformKind::FractionQ ? std::numeric_limits<double>::infinity() : 1.0;
}

bool RatioTransform::increasing_in_q() const noexcept {
  return kind_ == TransformKind::FractionQ || kind_ == TransformKind::RescaledPlus;
}

double RatioTransform::from_q(double q) const {
  if (!(q > 0.0) || std::isnan(q)) throw DomainError("q must be positive");
  switch (kind_) {
    case TransformKind::FractionQ:
      return q;
    case TransformKind::StandardR:
      return 1.0 / (1.0 + q);
    case TransformKind::RescaledPlus:
      return rescale_plus(*model_, q);
    case TransformKind::RescaledMinus:
      return rescale_minus(*model_, q);
  }
  return q;
}

double RatioTransform::operator()(double i1, double i2) const {
  require_positive_pair(i1, i2);
  // i1 / (i1 + i2) avoids the rounding of forming q first.
  if (kind_ == TransformKind::StandardR) return i1 / (i1 + i2);
  return from_q(i2 / i1);
}

double RatioTransform::to_q(double s) const {
  switch (kind_) {
    case TransformKind::FractionQ:
      if (!(s > 0.0)) throw DomainError("q must be positive");
      return s;
    case TransformKind::StandardR:
      if (!(s > 0.0 && s < 1.0)) throw DomainError("r must lie in (0, 1)");
      return (1.0 - s) / s;
    case TransformKind::RescaledPlus:
      return model_->q_cdf_inverse(s);
    case TransformKind::RescaledMinus:
      return model_->q_cdf_inverse(1.0 - s);
  }
  return s;
}

std::string RatioTransform::describe() const {
  switch (kind_) {
    case TransformKind::FractionQ:
      return "q";
    case TransformKind::StandardR:
      return "r";
    case TransformKind::RescaledPlus:
      return "rescale-plus[" + model_->describe() + "]";
    case TransformKind::RescaledMinus:
      return "rescale-minus[" + model_->describe() + "]";
  }
  return "?";
}

std::vector<double> sequence_ratios(const IntervalSequence& seq, const RatioTransform& t) {
  if (seq.size() < 2) {
    throw InputError("sequence '" + seq.source_id() + "' has fewer than 2 intervals");
  }
  const auto iv = seq.intervals();
  std::vector<double> out(iv.size() - 1);
  for (std::size_t k = 0; k + 1 < iv.size(); ++k) out[k] = t(iv[k], iv[k + 1]);
  return out;
}

}  // namespace ratiokit
