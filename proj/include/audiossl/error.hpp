#pragma once

#include <stdexcept>
#include <string>

namespace audiossl {

// Base class for all errors raised by the library. The CLI maps these to
// exit code 2; anything else escaping a command is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// File contents are malformed (bad header, truncated chunk, invalid JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

// File is recognized but uses an encoding we do not handle.
class UnsupportedError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Invalid argument or schema violation.
class ValueError : public Error {
 public:
  using Error::Error;
};

// Tensor/matrix dimensions do not match an operation's contract.
class ShapeError : public ValueError {
 public:
  using ValueError::ValueError;
};

// Input too short for the requested analysis.
class LengthError : public ValueError {
 public:
  using ValueError::ValueError;
};

// Non-finite value or otherwise numerically invalid state.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Object used out of sequence (e.g. backward without a forward cache).
class StateError : public Error {
 public:
  using Error::Error;
};

// Not enough usable data points for a statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Cross-object requirement violated (e.g. DSMs of different item counts).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace audiossl
