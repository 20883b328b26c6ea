#pragma once

#include <stdexcept>
#include <string>

namespace ddgame {

// Base for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, unknown keys, inconsistent shapes in files.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical failures; the CLI maps these to exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

struct DimensionMismatch : NumericalError {
  using NumericalError::NumericalError;
};

// kappa >= 1/2: the strong-monotonicity certificate does not apply.
struct KappaTooLarge : NumericalError {
  using NumericalError::NumericalError;
};

// Gram matrix singular or too ill-conditioned to trust the normal equations.
struct SingularGram : NumericalError {
  using NumericalError::NumericalError;
};

// A stated precondition (e.g. the sample-size gate) does not hold.
struct PreconditionFailed : NumericalError {
  using NumericalError::NumericalError;
};

struct MaxIterationsExceeded : NumericalError {
  using NumericalError::NumericalError;
};

struct DivergenceDetected : NumericalError {
  using NumericalError::NumericalError;
};

struct CycleDetected : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace ddgame
