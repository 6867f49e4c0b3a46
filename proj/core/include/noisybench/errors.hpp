#pragma once

#include <stdexcept>
#include <string>

namespace noisybench {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input the caller could have checked up front: unknown names, malformed
// files, out-of-range settings. The CLI maps this family to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A setting or spec string is malformed or out of range.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An API precondition was violated (dimension mismatch, out-of-bounds point,
// non-finite value, double wrapping).
class ContractError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A name was looked up and nothing is registered under it.
class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A serialized artifact's format version is newer than this build understands.
class VersionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A file could not be parsed. Carries the 1-based line number when known
// (-1 otherwise); the number is already part of the message.
class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& what, long line = -1)
      : ValidationError(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

// A finite plan (grid, fixed batch) has no more points to propose.
class PlanExhaustedError : public Error {
 public:
  using Error::Error;
};

// An objective evaluation failed or produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace noisybench
