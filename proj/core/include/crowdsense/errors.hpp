#pragma once

#include <stdexcept>
#include <string>

namespace crowdsense {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of two operands (or a vector and a model) do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of the operation (e.g. a probability
// on the boundary of the unit interval).
class DomainError : public Error {
 public:
  using Error::Error;
};

// User-supplied configuration or input data failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// The SVD did not converge; carries the reconstruction residual at exit.
class DecompositionError : public Error {
 public:
  DecompositionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Both hypotheses assign zero density to the observation.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

}  // namespace crowdsense
