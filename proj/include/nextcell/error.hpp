// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nextcell {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument values (rejected before any work starts).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// File cannot be opened, read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

/// File exists but its content cannot be parsed (truncated, bad token, bad shape).
class CorruptFileError : public IoError {
  public:
    using IoError::IoError;
};

/// File carries a format version this build does not understand.
class VersionError : public IoError {
  public:
    using IoError::IoError;
};

/// Iterative solver hit its iteration cap before reaching the requested tolerance.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Prediction was routed to a previous cell the bank has never seen.
class UnknownCellError : public Error {
  public:
    using Error::Error;
};

} // namespace nextcell
