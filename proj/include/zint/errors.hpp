#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zint {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Adaptive quadrature exhausted its evaluation budget before reaching the
// requested tolerance.
struct QuadratureError : Error {
  QuadratureError(const std::string& what, std::int64_t evals)
      : Error(what), evaluations(evals) {}
  std::int64_t evaluations = 0;
};

// Two second-type termination functions built over different changes of
// variable cannot be combined.
struct MismatchedMapError : Error {
  using Error::Error;
};

namespace expr {

struct SyntaxError : Error {
  SyntaxError(const std::string& message, std::size_t offset, int line, int column,
              const std::string& expected)
      : Error("syntax error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + " (offset " + std::to_string(offset) + "): " + message +
              (expected.empty() ? "" : "; expected " + expected)),
        offset(offset),
        line(line),
        column(column),
        expected(expected) {}
  std::size_t offset = 0;  // 0-based byte offset
  int line = 1;            // 1-based
  int column = 1;          // 1-based
  std::string expected;
};

struct UnboundSymbolError : Error {
  explicit UnboundSymbolError(const std::string& name)
      : Error("unbound symbol '" + name + "'"), symbol(name) {}
  std::string symbol;
};

struct EvalError : Error {
  EvalError(const std::string& operation, double operand)
      : Error("evaluation error in " + operation + " (operand " + std::to_string(operand) + ")"),
        operation(operation),
        operand(operand) {}
  std::string operation;
  double operand = 0.0;
};

}  // namespace expr

}  // namespace zint
