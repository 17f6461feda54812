#pragma once

#include <stdexcept>
#include <string>

namespace uniax {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: a parameter out of range, an unknown material, a
/// malformed stack. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Material or stack text that does not parse. Carries the 1-based line.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, int line)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Requested direction sine does not propagate in the medium.
class EvanescentError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// The substrate/compensator pair cannot cancel each other's birefringence.
class NoCompensationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Non-finite values, failed searches, undefined ratios. Exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace uniax
