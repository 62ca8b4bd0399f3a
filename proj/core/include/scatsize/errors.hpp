#pragma once

#include <stdexcept>
#include <string>

namespace scatsize {

/// Base class for every error this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonOrthogonalError : Error {
  using Error::Error;
};
struct NonUnitError : Error {
  using Error::Error;
};
struct NegativeBError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct OffSurfaceError : Error {
  using Error::Error;
};
struct InsideObstacleError : Error {
  using Error::Error;
};
struct NoConvergenceError : Error {
  using Error::Error;
};
struct NyquistViolationError : Error {
  using Error::Error;
};
struct TooFewPointsError : Error {
  using Error::Error;
};
struct ZeroAmplitudeError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace scatsize
