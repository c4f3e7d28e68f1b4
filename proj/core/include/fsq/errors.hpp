#pragma once

#include <stdexcept>
#include <string>

namespace fsq {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, unknown keys, out-of-range values.
struct ConfigError : Error {
  using Error::Error;
};

// A request that is well-formed but has no answer (nonpositive thrust,
// infeasible failure set, zero-rate primary axis, ...).
struct DomainError : Error {
  using Error::Error;
};

// An iterative solver failed to reach its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// Attitude kinematics hit the pitch singularity.
struct SingularityError : Error {
  using Error::Error;
};

}  // namespace fsq
