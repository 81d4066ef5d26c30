#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioshock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatches, duplicate or missing sectors, empty economies.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries 1-based line and column when known (0 = unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, std::size_t column, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        file_(file),
        line_(line),
        column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

/// An operation was called with inputs that violate its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// (I - A) is singular or its Neumann series does not converge.
class NonProductiveError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two algebraically equivalent routes disagreed. Indicates a numerical bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioshock
