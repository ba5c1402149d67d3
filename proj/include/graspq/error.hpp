#pragma once

#include <stdexcept>
#include <string>

namespace graspq {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. The message names the line or field path.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Argument violates a documented precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Settings or registry lookups that cannot be resolved (unknown mesh id etc.).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (non-finite values, singular systems that should not be).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace graspq
