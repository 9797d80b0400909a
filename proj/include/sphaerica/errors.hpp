#pragma once

#include <stdexcept>
#include <string>

namespace sphaerica {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its inputs (CLI exit 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A kernel was evaluated at (or too close to) its singularity.
class SingularityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A computation failed numerically, e.g. a singular linear system (CLI exit 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace sphaerica
