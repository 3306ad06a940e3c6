#pragma once

#include <stdexcept>
#include <string>

namespace squeezelab {

// Base for every failure raised by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-range parameters, broken invariants, malformed files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not agree (cutoffs, mode counts).
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The Fock cutoff is too small for the requested state or operation.
class CutoffError : public ValidationError {
 public:
  CutoffError(const std::string& what, double tail_weight)
      : ValidationError(what), tail_weight_(tail_weight) {}
  double tail_weight() const { return tail_weight_; }

 private:
  double tail_weight_;
};

// An iterative or quadrature routine did not reach its target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace squeezelab
