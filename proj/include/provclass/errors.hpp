#pragma once

#include <stdexcept>
#include <string>

namespace provclass {

/// Base class for all provclass errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad ids, malformed config, contract violations. CLI exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

/// I/O failure: missing files, unreadable paths. CLI exit code 2.
struct IoError : Error {
  using Error::Error;
};

/// Transport-level backend failure after retries are exhausted. CLI exit code 2.
struct BackendError : Error {
  using Error::Error;
};

/// Model output (or fixture) that does not match the expected grammar.
/// Carries the offending line so callers can log the raw response.
struct ParseError : Error {
  ParseError(const std::string& message, int line_number, std::string raw_line)
      : Error(message + " (line " + std::to_string(line_number) + ": \"" + raw_line + "\")"),
        line(line_number),
        raw(std::move(raw_line)) {}

  explicit ParseError(const std::string& message) : Error(message), line(0) {}

  int line;
  std::string raw;
};

}  // namespace provclass
