#pragma once

#include <stdexcept>
#include <string>

namespace bews {

/// Base class for every error this toolkit raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A transfer function was evaluated too close to one of its poles.
struct NearPole : Error {
  using Error::Error;
};

/// Polynomial root finding did not converge (ill-conditioned coefficients).
struct ConvergenceFailure : Error {
  using Error::Error;
};

/// State-space realization requested for a transfer function with
/// numerator degree above denominator degree.
struct ImproperTf : Error {
  using Error::Error;
};

/// An integration state or output stopped being finite.
struct NonFinite : Error {
  using Error::Error;
};

/// A tip-speed ratio left the cone-coefficient table grid.
struct OutOfEnvelope : Error {
  using Error::Error;
};

/// A wind-field configuration or sample produced a non-positive wind speed.
struct NonPositiveWind : Error {
  using Error::Error;
};

/// The complex decomposition matrices failed to reconstruct the real
/// inverse Coleman transformation.
struct ReconstructionMismatch : Error {
  using Error::Error;
};

/// Sine fit residual above threshold during frequency-response
/// identification (frequency too close to a pole, or too few cycles).
struct FitResidualTooLarge : Error {
  using Error::Error;
};

/// Configuration file failed schema validation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace bews
