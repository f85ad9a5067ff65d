#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvxdef/jet.hpp"

namespace cvxdef {

enum class Op { Const, Var, Neg, Sqrt, Exp, Log, Sin, Cos, Add, Sub, Mul, Div, Pow };

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;
std::string_view op_name(Op op) noexcept;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const only
  int var = -1;        // Var only, 0-based
  NodePtr a;
  NodePtr b;
};

/// Immutable expression handle. The arithmetic builders fold constants and
/// apply the 0/1 identities; `make` builds a node verbatim.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static Expr constant(double c);
  /// 0-based variable index; prints as x{index+1}.
  static Expr variable(int index);
  static Expr make(Op op, const Expr& a, const Expr& b = Expr(nullptr));

  const Node& node() const noexcept { return *node_; }
  const NodePtr& ptr() const noexcept { return node_; }
  Op op() const noexcept { return node_->op; }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }

  bool is_constant() const noexcept { return node_->op == Op::Const; }
  bool is_constant(double c) const noexcept { return is_constant() && node_->value == c; }

 private:
  NodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& b);
Expr sqrt(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Parses the infix grammar. Variables x1..x{dim}; functions sqrt exp log sin cos.
Expr parse_expr(std::string_view src, std::size_t dim);

/// Fully parenthesized text that parses back to a structurally equal tree.
std::string to_string(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);
/// Largest 0-based variable index, or -1 for a constant expression.
int max_variable_index(const Expr& e);
std::size_t node_count(const Expr& e);

/// The same function rebuilt through the folding operators (x·0 → 0, constant subtrees evaluated).
Expr simplify(const Expr& e);

/// ∂e/∂x_{var} (var 0-based).
Expr differentiate(const Expr& e, int var);

/// Plain double evaluation with the domain checks of the jet program.
double evaluate(const Expr& e, std::span<const double> x);

/// Compiled tape holding the expression and all its partial derivatives up to
/// `max_order` (≤ 4), each derivative tree built symbolically.
class JetProgram {
 public:
  JetProgram(const Expr& e, std::size_t dim, int max_order = 3);

  std::size_t dim() const noexcept { return dim_; }
  int max_order() const noexcept { return max_order_; }
  std::size_t tape_size() const noexcept { return tape_.size(); }
  const Expr& expr() const noexcept { return expr_; }

  double value(std::span<const double> x) const;
  Jet3 jet(std::span<const double> x, int order = 3) const;
  Jet4 jet4(std::span<const double> x) const;

 private:
  struct Instr {
    Op op;
    double value;
    int var;
    int a;
    int b;
    const Node* source;
  };

  std::vector<double> run(std::span<const double> x, int order) const;

  Expr expr_;
  std::size_t dim_;
  int max_order_;
  std::vector<Instr> tape_;
  std::vector<std::size_t> boundary_;  // tape prefix length needed for each order
  std::vector<Expr> keep_;             // owns every node the tape points into
  // Output slots: value, then per order the sorted index tuples in colex order.
  int value_slot_ = 0;
  std::vector<int> grad_slots_;
  std::vector<int> hess_slots_;
  std::vector<int> third_slots_;
  std::vector<int> fourth_slots_;
};

/// Convenience: builds a third-order program and evaluates it once.
Jet3 eval_jet3(const Expr& e, std::span<const double> x);

}  // namespace cvxdef
