#pragma once

#include <stdexcept>
#include <string>

namespace iddlab {

/// Invalid arguments: out-of-range parameters, non-finite inputs, malformed data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid metric or grid configuration (e.g. r <= 2).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure: quadrature truncation, underflow, loss of positivity.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A characteristic function or transform was not strictly positive where
/// a logarithm or real root was required.
class PositivityError : public NumericError {
 public:
  PositivityError(double t, double value);

  double where() const noexcept { return t_; }
  double value() const noexcept { return value_; }

 private:
  double t_;
  double value_;
};

/// Requested moment does not exist (heavy-tailed law).
class NoFiniteMomentError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace iddlab
