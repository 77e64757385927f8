#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbs {

/// Base class for every error raised by the workbench core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (out of domain,
/// mismatched bounds, a > b in a left subtraction, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic left the representable range (ordinals below w^w with
/// 64-bit coefficients, bounded pattern expansions).
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Two points, or a point and a relation, live in different spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// DSL syntax or semantic error carrying a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& bare_message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

}  // namespace gbs
