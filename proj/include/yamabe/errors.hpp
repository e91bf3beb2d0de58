#pragma once

#include <stdexcept>
#include <string>

namespace yamabe {

/// Query outside the domain of a field or profile.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity required to be positive (conformal factor, warping function)
/// was not.
class PositivityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative numerical kernel failed to meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or construction parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace yamabe
