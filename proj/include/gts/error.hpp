#pragma once

#include <stdexcept>
#include <string>

namespace gts {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error with source location (1-based line/column).
class ParseError : public Error {
public:
  ParseError(const std::string& message, int line, int column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Raised when a formula is evaluated against a structure it does not fit
/// (unbound variable, unknown predicate, arity mismatch).
class EvalError : public Error {
public:
  using Error::Error;
};

/// Model-level validation failure (unresolved name, missing start shape, ...).
class ModelError : public Error {
public:
  using Error::Error;
};

} // namespace gts
