#pragma once

#include <stdexcept>
#include <string>

namespace latdecor {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates the invariant of its type (unbalanced flow, non-admissible set, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Arguments are outside an operation's domain (dimension mismatch, I1 == I2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Floating-point or exact computation could not be completed
/// (basis reduction failure, unbounded LP, overflow).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A check that must hold by construction did not; always a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace latdecor
