#pragma once

#include <stdexcept>
#include <string>

namespace mpirecon {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file (or running an external process) failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// An iterative solver or numerical routine could not produce a usable result.
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {
inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}
}  // namespace detail

}  // namespace mpirecon
