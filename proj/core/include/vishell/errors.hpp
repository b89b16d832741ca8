#pragma once

#include <stdexcept>
#include <string>

namespace vishell {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The chart tangent vectors are (numerically) linearly dependent at a point.
struct DegenerateChartError : Error {
    using Error::Error;
};

// The offset map theta + x3*eps*a3 self-intersects: det of the in-plane
// Jacobian factor became non-positive for the requested eps.
struct EpsilonTooLargeError : Error {
    using Error::Error;
};

// theta_v = 0: the purely elastic branch is outside the constitutive
// reductions implemented here and must be treated by a separate model.
struct ElasticCaseError : Error {
    using Error::Error;
};

// The assembled time-step matrix failed the positive-definiteness probe.
struct IndefiniteSystemError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

struct MeshMismatchError : Error {
    using Error::Error;
};

struct ZeroFieldError : Error {
    using Error::Error;
};

struct InadmissibleFieldError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace vishell
