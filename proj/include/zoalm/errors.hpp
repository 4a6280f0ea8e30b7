#pragma once

#include <stdexcept>
#include <string>

namespace zoalm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a precondition.
class InputError : public Error {
  public:
    using Error::Error;
};

/// A computation produced a non-finite or otherwise unusable value.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// Operation not available for this object (e.g. no verifier attached).
class UnsupportedOperation : public Error {
  public:
    using Error::Error;
};

/// Requested radius cannot satisfy the accuracy conditions.
class InfeasibleTolerance : public Error {
  public:
    using Error::Error;
};

/// Malformed configuration or data file.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace zoalm
