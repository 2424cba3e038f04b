#pragma once

#include <stdexcept>
#include <string>

namespace critpol {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or dimension mismatch between operators, states and spaces.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented precondition (negative rate, tol <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Physics-domain failures. The CLI maps all of these to exit code 3.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Linearized coupling beyond the critical point; `magnitude` is |omega_-^2|.
class UnstableRegime : public DomainError {
 public:
  UnstableRegime(const std::string& what, double magnitude)
      : DomainError(what), magnitude_(magnitude) {}
  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

/// omega_- is zero (or closer to zero than the caller allows).
class SingularCoupling : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Dispersive expansion parameter zeta >= 1.
class NonDispersive : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Fixed-point solver could not find the steady state.
class NonConvergence : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Fock truncation too small for the requested thermal state.
class TruncationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integrator trace drift exceeded its hard limit.
class IntegrationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Matrix does not satisfy the density-matrix invariants.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or CLI arguments (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace critpol
