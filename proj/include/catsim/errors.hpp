#pragma once

#include <stdexcept>
#include <string>

namespace catsim {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fock truncation discards more probability than the allowed tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Two-mode buffer would exceed the configured element budget.
class TruncationBudgetError : public Error {
 public:
  using Error::Error;
};

class ZeroStateError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A state violates Hermiticity, unit trace or positivity.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

class SingularLikelihoodError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An upstream pipeline stage has not produced its outputs.
class MissingInputError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace catsim
