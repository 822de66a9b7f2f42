#include <zint/exprparse.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace zint::expr {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kE = 2.718281828459045;

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end } kind = Kind::end;
  double number = 0.0;
  std::string text;
  char op = 0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  // Owns a copy so strtod always sees a NUL-terminated buffer.
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(std::size_t offset, const std::string& msg,
                         const std::string& expected) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, offset, line, col, expected);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::end;
      return;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail(pos_, "malformed number", "digit");
      tok_.kind = Token::Kind::number;
      tok_.number = v;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
        ++j;
      tok_.kind = Token::Kind::ident;
      tok_.text.assign(text_.substr(pos_, j - pos_));
      pos_ = j;
      return;
    }
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '/':
      case '^':
        tok_.kind = Token::Kind::op;
        tok_.op = c;
        ++pos_;
        return;
      case '(':
        tok_.kind = Token::Kind::lparen;
        ++pos_;
        return;
      case ')':
        tok_.kind = Token::Kind::rparen;
        ++pos_;
        return;
      default:
        fail(pos_, std::string("unexpected character '") + c + "'",
             "number, symbol, function, '(', or operator");
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
  Token tok_;
};

NodePtr make_num(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->number = v;
  return n;
}

NodePtr make_const(std::string name, double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->name = std::move(name);
  n->number = v;
  return n;
}

NodePtr make_sym(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::symbol;
  n->name = std::move(name);
  return n;
}

NodePtr make_neg(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::negate;
  n->a = std::move(a);
  return n;
}

NodePtr make_bin(BinOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_call(Func fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::call;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

bool lookup_func(const std::string& name, Func& out) {
  static const std::array<std::pair<const char*, Func>, 7> table = {{{"sin", Func::sin},
                                                                     {"cos", Func::cos},
                                                                     {"tan", Func::tan},
                                                                     {"exp", Func::exp},
                                                                     {"ln", Func::ln},
                                                                     {"sqrt", Func::sqrt},
                                                                     {"abs", Func::abs}}};
  for (const auto& [n, f] : table)
    if (name == n) {
      out = f;
      return true;
    }
  return false;
}

// Binding powers: + - (10), * / (20), unary minus (25), ^ (30, right-assoc).
class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Expr run() {
    NodePtr root = parse_expr(0);
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end)
      lex_.fail(t.offset, "trailing input", "operator or end of input");
    return Expr(std::move(root));
  }

 private:
  NodePtr parse_expr(int min_bp) {
    NodePtr lhs = parse_unary();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Token::Kind::op) break;
      BinOp op;
      int l_bp, r_bp;
      switch (t.op) {
        case '+': op = BinOp::add; l_bp = 10; r_bp = 11; break;
        case '-': op = BinOp::sub; l_bp = 10; r_bp = 11; break;
        case '*': op = BinOp::mul; l_bp = 20; r_bp = 21; break;
        case '/': op = BinOp::div; l_bp = 20; r_bp = 21; break;
        case '^': op = BinOp::pow; l_bp = 30; r_bp = 30; break;  // right-assoc
        default: return lhs;
      }
      if (l_bp < min_bp) break;
      lex_.take();
      NodePtr rhs = parse_expr(r_bp);
      lhs = make_bin(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::op && t.op == '-') {
      lex_.take();
      return make_neg(parse_expr(25));
    }
    if (t.kind == Token::Kind::op && t.op == '+') {
      lex_.take();
      return parse_unary();
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::number:
        lex_.take();
        return make_num(t.number);
      case Token::Kind::lparen: {
        lex_.take();
        NodePtr inner = parse_expr(0);
        const Token& close = lex_.peek();
        if (close.kind != Token::Kind::rparen)
          lex_.fail(close.offset, "unbalanced parenthesis", "')'");
        lex_.take();
        return inner;
      }
      case Token::Kind::ident: {
        lex_.take();
        Func fn;
        if (lookup_func(t.text, fn)) {
          const Token& open = lex_.peek();
          if (open.kind != Token::Kind::lparen)
            lex_.fail(open.offset, "function '" + t.text + "' requires an argument list", "'('");
          lex_.take();
          NodePtr arg = parse_expr(0);
          const Token& close = lex_.peek();
          if (close.kind != Token::Kind::rparen)
            lex_.fail(close.offset, "unbalanced parenthesis", "')'");
          lex_.take();
          return make_call(fn, std::move(arg));
        }
        if (t.text == "pi") return make_const("pi", kPi);
        if (t.text == "e") return make_const("e", kE);
        return make_sym(t.text);
      }
      default:
        lex_.fail(t.offset, "expected an operand",
                  "number, symbol, function, '(' or unary minus");
    }
  }

  Lexer lex_;
};

double eval_node(const Node& n, const std::map<std::string, double>& env) {
  switch (n.kind) {
    case Node::Kind::number:
    case Node::Kind::constant:
      return n.number;
    case Node::Kind::symbol: {
      const auto it = env.find(n.name);
      if (it == env.end()) throw UnboundSymbolError(n.name);
      if (!std::isfinite(it->second)) throw EvalError("binding of " + n.name, it->second);
      return it->second;
    }
    case Node::Kind::negate:
      return -eval_node(*n.a, env);
    case Node::Kind::binary: {
      const double a = eval_node(*n.a, env);
      const double b = eval_node(*n.b, env);
      double r = 0.0;
      switch (n.op) {
        case BinOp::add: r = a + b; break;
        case BinOp::sub: r = a - b; break;
        case BinOp::mul: r = a * b; break;
        case BinOp::div:
          if (b == 0.0) throw EvalError("division by zero", a);
          r = a / b;
          break;
        case BinOp::pow:
          r = std::pow(a, b);
          break;
      }
      if (!std::isfinite(r)) throw EvalError("arithmetic overflow or domain violation", a);
      return r;
    }
    case Node::Kind::call: {
      const double a = eval_node(*n.a, env);
      double r = 0.0;
      switch (n.fn) {
        case Func::sin: r = std::sin(a); break;
        case Func::cos: r = std::cos(a); break;
        case Func::tan: r = std::tan(a); break;
        case Func::exp: r = std::exp(a); break;
        case Func::ln:
          if (!(a > 0.0)) throw EvalError("ln of a nonpositive value", a);
          r = std::log(a);
          break;
        case Func::sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative value", a);
          r = std::sqrt(a);
          break;
        case Func::abs: r = std::abs(a); break;
      }
      if (!std::isfinite(r)) throw EvalError("function overflow", a);
      return r;
    }
  }
  throw Error("eval: corrupt expression tree");
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
  }
  return "?";
}

int node_bp(const Node& n) {
  switch (n.kind) {
    case Node::Kind::binary:
      switch (n.op) {
        case BinOp::add:
        case BinOp::sub: return 10;
        case BinOp::mul:
        case BinOp::div: return 20;
        case BinOp::pow: return 30;
      }
      return 0;
    case Node::Kind::negate: return 25;
    default: return 100;
  }
}

void print_node(const Node& n, std::string& out, int parent_bp, bool right_side) {
  const int bp = node_bp(n);
  const bool parens =
      bp < parent_bp || (bp == parent_bp && right_side && n.kind == Node::Kind::binary &&
                         n.op != BinOp::pow);
  (void)right_side;
  const bool need = parens;
  if (need) out += '(';
  switch (n.kind) {
    case Node::Kind::number: {
      char buf[40];
      const auto res = std::to_chars(buf, buf + sizeof(buf), n.number);
      out.append(buf, res.ptr);
      break;
    }
    case Node::Kind::constant:
    case Node::Kind::symbol:
      out += n.name;
      break;
    case Node::Kind::negate:
      out += '-';
      print_node(*n.a, out, 26, false);
      break;
    case Node::Kind::binary: {
      const char* op = n.op == BinOp::add   ? "+"
                       : n.op == BinOp::sub ? "-"
                       : n.op == BinOp::mul ? "*"
                       : n.op == BinOp::div ? "/"
                                            : "^";
      const bool rassoc = n.op == BinOp::pow;
      print_node(*n.a, out, rassoc ? bp + 1 : bp, false);
      out += op;
      print_node(*n.b, out, rassoc ? bp : bp + 1, true);
      break;
    }
    case Node::Kind::call:
      out += func_name(n.fn);
      out += '(';
      print_node(*n.a, out, 0, false);
      out += ')';
      break;
  }
  if (need) out += ')';
}

bool equal_node(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::number:
      return a->number == b->number;
    case Node::Kind::constant:
    case Node::Kind::symbol:
      return a->name == b->name;
    case Node::Kind::negate:
      return equal_node(a->a, b->a);
    case Node::Kind::binary:
      return a->op == b->op && equal_node(a->a, b->a) && equal_node(a->b, b->b);
    case Node::Kind::call:
      return a->fn == b->fn && equal_node(a->a, b->a);
  }
  return false;
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

double eval_expr(const Expr& e, const std::map<std::string, double>& bindings) {
  if (!e.valid()) throw Error("eval_expr: empty expression");
  return eval_node(*e.root(), bindings);
}

std::string to_string(const Expr& e) {
  if (!e.valid()) return "";
  std::string out;
  print_node(*e.root(), out, 0, false);
  return out;
}

bool equal(const Expr& a, const Expr& b) { return equal_node(a.root(), b.root()); }

}  // namespace zint::expr
