#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ratiokit {

// Argument outside the mathematical domain of an operation (q <= 0, r outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed user data. Carries the offending index or file line when known.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::optional<std::size_t> location = std::nullopt)
      : std::runtime_error(what), location_(location) {}

  std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  std::optional<std::size_t> location_;
};

// A numeric routine exhausted its budget; best_estimate is the last value it had.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace ratiokit
