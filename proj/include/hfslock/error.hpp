#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfslock {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad quantum numbers, malformed files, inconsistent configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a usable answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Text input that failed to parse; carries a 1-based location.
class ParseError : public ValidationError {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace hfslock
