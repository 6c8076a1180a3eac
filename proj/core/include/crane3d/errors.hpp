#pragma once

#include <stdexcept>
#include <string>

namespace crane3d {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A physical or configuration parameter violates its validity constraints.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// A state vector left its admissible region (non-finite entries, rope too short, ...).
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// The adaptive integrator could not make progress at the requested tolerance.
class StiffnessError : public Error {
public:
    using Error::Error;
};

/// More same-instant discrete transitions than the per-axis budget allows.
class ChatteringError : public Error {
public:
    using Error::Error;
};

/// Regression matrix is rank deficient or numerically ill conditioned.
class IllConditionedError : public Error {
public:
    using Error::Error;
};

/// An estimation step was invoked on data that does not meet its preconditions.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A breakaway ramp ended without the axis ever moving.
class SaturationError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration file (unknown keys, missing fields, bad values).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside GPR (Gram matrix not positive definite after jitter).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace crane3d
