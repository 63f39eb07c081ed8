#pragma once

#include <stdexcept>
#include <string>

namespace durasim {

// Invalid model parameter or call argument.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent trial configuration (weights, n/d, mismatched designs).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A closed form was requested for a model family that has none.
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data outside the support of the model being fitted.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Not enough observations (or events) to fit a model.
class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature, root finding or optimisation failed to converge.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  explicit NumericError(const std::string& what)
      : NumericError(what, 0.0) {}

  // Achieved error estimate or last iterate, depending on the raiser.
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace durasim
