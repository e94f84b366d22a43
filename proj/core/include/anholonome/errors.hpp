#pragma once

#include <stdexcept>
#include <string>

namespace anholonome {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes disagree with a declared chart or frame dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An evaluator produced a non-finite value (pole, domain violation).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A linear system failed its pivot or determinant threshold.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Supplied frame/group data contradicts an identity it must satisfy.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A model failed a structural precondition at construction.
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the chart region an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A run configuration or parameter set failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised by the integrators; carries the time of the failing step.
class DynamicsError : public Error {
 public:
  DynamicsError(double time, const std::string& what)
      : Error("dynamics failure at t=" + std::to_string(time) + ": " + what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace anholonome
