#pragma once

#include <stdexcept>
#include <string>

namespace satsol {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Non-finite values, bracket failures and similar breakdowns of a numerical method.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Shooting could not find a sign change in its bracket.
class BracketError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Iterative method stopped without meeting its tolerance.
class ConvergenceError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Gradient flow energy kept increasing; the pseudo-time step is too large.
class StepSizeError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Request lies outside the regime where the requested object exists.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configured size limit would be exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace satsol
