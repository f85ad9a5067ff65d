#include "cvxdef/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "cvxdef/errors.hpp"
#include "differentiator.hpp"
#include "node_eval.hpp"

namespace cvxdef {

bool is_unary(Op op) noexcept {
  return op == Op::Neg || op == Op::Sqrt || op == Op::Exp || op == Op::Log || op == Op::Sin || op == Op::Cos;
}

bool is_binary(Op op) noexcept {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
}

std::string_view op_name(Op op) noexcept {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Neg: return "-";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Builders

Expr Expr::constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = c;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0) throw DimensionError("variable index must be non-negative");
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  return Expr(std::move(n));
}

Expr Expr::make(Op op, const Expr& a, const Expr& b) {
  if (op == Op::Const || op == Op::Var) throw DimensionError("Expr::make: leaf op");
  if (!a.node_ || (is_binary(op) && !b.node_)) throw DimensionError("Expr::make: missing operand");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a.node_;
  if (is_binary(op)) n->b = b.node_;
  return Expr(std::move(n));
}

namespace {

// Folds when the operation is defined at the constant operands; otherwise the
// node is kept so evaluation reports the domain error.
Expr fold_or_make(Op op, const Expr& a, const Expr& b = Expr(nullptr)) {
  const bool consts = a.is_constant() && (!is_binary(op) || b.is_constant());
  if (consts) {
    try {
      return Expr::constant(detail::apply_op(op, a.node().value, is_binary(op) ? b.node().value : 0.0, nullptr));
    } catch (const EvalError&) {
    }
  }
  return Expr::make(op, a, b);
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.op() == Op::Neg && structurally_equal(a, b.lhs())) return Expr::constant(0.0);
  if (a.op() == Op::Neg && structurally_equal(a.lhs(), b)) return Expr::constant(0.0);
  return fold_or_make(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (!a.is_constant() && structurally_equal(a, b)) return Expr::constant(0.0);
  return fold_or_make(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return fold_or_make(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (!a.is_constant() && structurally_equal(a, b)) return Expr::constant(1.0);
  return fold_or_make(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.op() == Op::Neg) return a.lhs();
  return fold_or_make(Op::Neg, a);
}

Expr pow(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(0.0)) return Expr::constant(1.0);
  return fold_or_make(Op::Pow, a, b);
}

Expr sqrt(const Expr& a) { return fold_or_make(Op::Sqrt, a); }
Expr exp(const Expr& a) { return fold_or_make(Op::Exp, a); }
Expr log(const Expr& a) { return fold_or_make(Op::Log, a); }
Expr sin(const Expr& a) { return fold_or_make(Op::Sin, a); }
Expr cos(const Expr& a) { return fold_or_make(Op::Cos, a); }

Expr simplify(const Expr& e) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const NodePtr&)> walk = [&](const NodePtr& p) -> Expr {
    if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
    Expr out(p);
    if (p->op != Op::Const && p->op != Op::Var) {
      const Expr a = walk(p->a);
      const Expr b = p->b ? walk(p->b) : Expr(nullptr);
      switch (p->op) {
        case Op::Add: out = a + b; break;
        case Op::Sub: out = a - b; break;
        case Op::Mul: out = a * b; break;
        case Op::Div: out = a / b; break;
        case Op::Pow: out = pow(a, b); break;
        case Op::Neg: out = -a; break;
        default: out = fold_or_make(p->op, a); break;
      }
    }
    memo.emplace(p.get(), out);
    return out;
  };
  return walk(e.ptr());
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view src, std::size_t dim) : src_(src), dim_(dim) {}

  Expr parse() {
    skip_ws();
    if (pos_ == src_.size()) fail("empty expression");
    Expr e = expression();
    skip_ws();
    if (pos_ != src_.size()) fail(std::string("unexpected character '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::make(Op::Pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      // "(-c)" is how negative constants print.
      const std::size_t save = pos_;
      if (accept('-')) {
        skip_ws();
        if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          const Expr c = number();
          if (accept(')')) return Expr::constant(-c.node().value);
        }
        pos_ = save;
      }
      Expr inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++count;
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      std::size_t index = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (res.ec != std::errc() || index == 0 || index > dim_) {
        pos_ = start;
        fail("variable " + std::string(name) + " out of range for dimension " + std::to_string(dim_));
      }
      return Expr::variable(static_cast<int>(index - 1));
    }

    Op op;
    if (name == "sqrt") {
      op = Op::Sqrt;
    } else if (name == "exp") {
      op = Op::Exp;
    } else if (name == "log") {
      op = Op::Log;
    } else if (name == "sin") {
      op = Op::Sin;
    } else if (name == "cos") {
      op = Op::Cos;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (!accept('(')) fail("expected '(' after " + std::string(name));
    Expr arg = expression();
    if (!accept(')')) fail("expected ')'");
    return Expr::make(op, arg);
  }

  std::string_view src_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src, std::size_t dim) {
  if (dim == 0) throw DimensionError("parse_expr: dimension must be at least 1");
  return Parser(src, dim).parse();
}

// ---------------------------------------------------------------------------
// Printing and structure

namespace {

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Const: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      const std::string text(buf, res.ptr);
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += "(" + text + ")";
      } else {
        out += text;
      }
      return;
    }
    case Op::Var:
      out += "x" + std::to_string(n.var + 1);
      return;
    case Op::Neg:
      out += "(-";
      if (n.a->op == Op::Const) {
        out += "(";
        print(*n.a, out);
        out += ")";
      } else {
        print(*n.a, out);
      }
      out += ")";
      return;
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log:
    case Op::Sin:
    case Op::Cos:
      out += op_name(n.op);
      out += "(";
      print(*n.a, out);
      out += ")";
      return;
    default:
      out += "(";
      print(*n.a, out);
      out += " ";
      out += op_name(n.op);
      out += " ";
      print(*n.b, out);
      out += ")";
      return;
  }
}

bool equal_nodes(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->op != b->op) return false;
  if (a->op == Op::Const) return a->value == b->value || (std::isnan(a->value) && std::isnan(b->value));
  if (a->op == Op::Var) return a->var == b->var;
  return equal_nodes(a->a.get(), b->a.get()) && equal_nodes(a->b.get(), b->b.get());
}

int max_var(const Node* n, std::map<const Node*, int>& memo) {
  if (n == nullptr) return -1;
  if (n->op == Op::Var) return n->var;
  if (n->op == Op::Const) return -1;
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const int v = std::max(max_var(n->a.get(), memo), max_var(n->b.get(), memo));
  memo.emplace(n, v);
  return v;
}

void collect(const Node* n, std::unordered_set<const Node*>& seen) {
  if (n == nullptr || !seen.insert(n).second) return;
  collect(n->a.get(), seen);
  collect(n->b.get(), seen);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e.node(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) { return equal_nodes(&a.node(), &b.node()); }

int max_variable_index(const Expr& e) {
  std::map<const Node*, int> memo;
  return max_var(&e.node(), memo);
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const Node*> seen;
  collect(&e.node(), seen);
  return seen.size();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Node* n, std::span<const double> x, std::map<const Node*, double>& memo) {
  switch (n->op) {
    case Op::Const:
      return n->value;
    case Op::Var:
      if (static_cast<std::size_t>(n->var) >= x.size()) throw DimensionError("evaluate: point has too few coordinates");
      return x[static_cast<std::size_t>(n->var)];
    default:
      break;
  }
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const double a = eval_node(n->a.get(), x, memo);
  const double b = n->b ? eval_node(n->b.get(), x, memo) : 0.0;
  const double v = detail::apply_op(n->op, a, b, n);
  memo.emplace(n, v);
  return v;
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> x) {
  std::map<const Node*, double> memo;
  return eval_node(&e.node(), x, memo);
}

// ---------------------------------------------------------------------------
// Differentiation


Expr differentiate(const Expr& e, int var) {
  if (var < 0) throw DimensionError("differentiate: variable index must be non-negative");
  detail::Differentiator diff;
  return diff.d(e, var);
}

}  // namespace cvxdef
