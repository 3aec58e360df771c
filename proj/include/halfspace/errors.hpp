#pragma once

#include <stdexcept>
#include <string>

namespace halfspace {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of the operation (non-finite input, t <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation at a kernel singularity.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Precondition failed; `measured` carries the offending residual.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, double measured)
        : Error(what + " (measured " + std::to_string(measured) + ")"), measured(measured) {}
    double measured;
};

/// Numerical solve failed.
class SolverError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written, or its contents are malformed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace halfspace
