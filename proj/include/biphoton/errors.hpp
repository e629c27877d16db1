#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Base class for every error thrown by the library. The CLI maps
// subclasses to exit codes: configuration/domain problems exit 1,
// numeric/fit failures exit 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on a physical quantity was violated (non-positive
// length, visibility outside [0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// The spectral density is unusable (identically zero, negative values,
// not integrable).
class InvalidSpectrumError : public DomainError {
public:
    using DomainError::DomainError;
};

// Configuration file or CLI arguments are invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numeric routine failed to reach the requested tolerance. Carries the
// error estimate that was actually achieved.
class NumericError : public Error {
public:
    NumericError(const std::string& msg, double achieved)
        : Error(msg), achieved_error(achieved) {}
    double achieved_error = 0.0;
};

// Nonlinear fit did not converge.
class FitError : public Error {
public:
    using Error::Error;
};

// Not enough data to run an estimator (too few bins, degenerate histogram).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Trace has no usable signal (e.g. all counts zero).
class DegenerateTraceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace biphoton
