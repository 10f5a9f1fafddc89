#pragma once

#include <stdexcept>
#include <string>

namespace helicity {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: scenario files, expressions, command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two fields that should live on one grid do not.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Anything that goes wrong while computing: non-finite data, positivity
/// loss, singular deformation, solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PositivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularDeformationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IndefiniteOperatorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepRejectedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : NumericalError(what), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace helicity
