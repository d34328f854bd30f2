#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ratiokit {

class NullModel;

/// Ordered positive durations (seconds) from one sequence.
class IntervalSequence {
 public:
  IntervalSequence() = default;
  /// Throws InputError (with the index) if any duration is not finite and > 0.
  explicit IntervalSequence(std::vector<double> intervals, std::string source_id = {});

  std::span<const double> intervals() const noexcept { return intervals_; }
  const std::string& source_id() const noexcept { return source_id_; }
  std::size_t size() const noexcept { return intervals_.size(); }
  double operator[](std::size_t k) const { return intervals_[k]; }

 private:
  std::vector<double> intervals_;
  std::string source_id_;
};

/// Strictly increasing event times (seconds).
class OnsetSequence {
 public:
  /// Throws InputError at the first index that does not increase.
  explicit OnsetSequence(std::vector<double> onsets, std::string source_id = {});

  std::span<const double> onsets() const noexcept { return onsets_; }
  const std::string& source_id() const noexcept { return source_id_; }
  std::size_t size() const noexcept { return onsets_.size(); }

 private:
  std::vector<double> onsets_;
  std::string source_id_;
};

enum class TransformKind { FractionQ, StandardR, RescaledPlus, RescaledMinus };

/// Scale-invariant map from an adjacent interval pair to a scalar, written
/// as a function of q = i2 / i1.
///
///  - FractionQ:     q                   codomain (0, inf)
///  - StandardR:     1 / (1 + q)         codomain (0, 1), decreasing in q
///  - RescaledPlus:  P_Q(q) of a model   codomain [0, 1], increasing in q
///  - RescaledMinus: 1 - P_Q(q)          codomain [0, 1], decreasing in q
///
/// The rescaled kinds hold the null model whose ratio CDF they apply.
class RatioTransform {
 public:
  static RatioTransform fraction_q();
  static RatioTransform standard_r();
  static RatioTransform rescaled_plus(std::shared_ptr<const NullModel> model);
  static RatioTransform rescaled_minus(std::shared_ptr<const NullModel> model);

  TransformKind kind() const noexcept { return kind_; }
  const std::shared_ptr<const NullModel>& model() const noexcept { return model_; }

  bool unit_codomain() const noexcept { return kind_ != TransformKind::FractionQ; }
  /// Upper end of the codomain (infinity for FractionQ, 1 otherwise).
  double codomain_upper() const noexcept;
  bool increasing_in_q() const noexcept;

  /// Transform value for a given q > 0.
  double from_q(double q) const;
  /// Transform value for an interval pair; equal to from_q(i2 / i1).
  double operator()(double i1, double i2) const;
  /// Inverse map back to q; for rescaled kinds this inverts the model's P_Q numerically.
  double to_q(double s) const;

  std::string describe() const;

 private:
  RatioTransform(TransformKind kind, std::shared_ptr<const NullModel> model)
      : kind_(kind), model_(std::move(model)) {}

  TransformKind kind_ = TransformKind::StandardR;
  std::shared_ptr<const NullModel> model_;
};

IntervalSequence intervals_from_onsets(const OnsetSequence& onsets);

/// q = i2 / i1. Throws DomainError for non-positive intervals.
double ratio_q(double i1, double i2);

/// r = i1 / (i1 + i2), the standard rhythm ratio. Throws DomainError for non-positive intervals.
double ratio_r(double i1, double i2);

/// Applies t to every adjacent pair (i_k, i_{k+1}); output has size() - 1 entries.
std::vector<double> sequence_ratios(const IntervalSequence& seq, const RatioTransform& t);

}  // namespace ratiokit
