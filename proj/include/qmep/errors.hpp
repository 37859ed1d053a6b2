#pragma once

#include <stdexcept>
#include <string>

namespace qmep {

/// Input outside the domain of an operation (non-finite momentum, energy
/// below the band edge, unrealizable moments, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative procedure (adaptive quadrature, Newton) stopped before
/// meeting its tolerance. Carries the last estimate it had.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_(partial_value), error_(error_estimate) {}

  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

private:
  double partial_;
  double error_;
};

/// A linear system that is numerically singular.
class ConditioningError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmep
