#pragma once

#include <zint/errors.hpp>

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace zint::expr {

enum class BinOp { add, sub, mul, div, pow };
enum class Func { sin, cos, tan, exp, ln, sqrt, abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { number, constant, symbol, negate, binary, call } kind = Kind::number;
  double number = 0.0;       // number
  std::string name;          // constant ("pi", "e") or symbol
  BinOp op = BinOp::add;     // binary
  Func fn = Func::sin;       // call
  NodePtr a, b;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  const NodePtr& root() const { return root_; }
  bool valid() const { return root_ != nullptr; }

 private:
  NodePtr root_;
};

// Standard precedence: ^ (right-associative, tightest), unary minus, * /,
// + -.  Whitespace-insensitive; no implicit multiplication.  Functions:
// sin cos tan exp ln sqrt abs; constants: pi e.  Failures raise SyntaxError
// with 0-based offset, 1-based line/column, and the expected-token set.
Expr parse(std::string_view text);

// IEEE-754 double evaluation.  Domain violations (ln of a nonpositive value,
// division by zero, ...) raise EvalError; unknown names raise
// UnboundSymbolError.  Never returns NaN or infinity.
double eval_expr(const Expr& e, const std::map<std::string, double>& bindings);

// Canonical text form; parse(to_string(e)) reproduces the tree exactly.
std::string to_string(const Expr& e);

bool equal(const Expr& a, const Expr& b);

}  // namespace zint::expr
