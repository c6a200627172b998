#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ratiosynth {

enum class ErrorKind {
  Parse,
  Validation,
  AlphabetMismatch,
  Nondeterminism,
  Incompleteness,
  PolicyMismatch,
  SingularSystem,
  NotUnichain,
  Infeasible,
  Unbounded,
  NumericalFailure,
  NotCommunicating,
  DegenerateDecoding,
  Unreachable,
  NoMaec,
  TaskUnsatisfiable,
  Param,
};

std::string_view to_string(ErrorKind kind);

/// Base error type for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error in one of the text formats; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace ratiosynth
