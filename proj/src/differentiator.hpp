#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cvxdef/errors.hpp"
#include "cvxdef/expr.hpp"

namespace cvxdef {

namespace detail {

/// Memoized symbolic differentiation; results share subtrees with their inputs.
class Differentiator {
 public:
  Expr d(const Expr& e, int var) {
    const Node* key = &e.node();
    if (auto it = memo_.find({key, var}); it != memo_.end()) return it->second;
    Expr out = rule(e, var);
    memo_.emplace(std::make_pair(key, var), out);
    inputs_.push_back(e);
    return out;
  }

 private:
  Expr rule(const Expr& e, int var) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Const:
        return Expr::constant(0.0);
      case Op::Var:
        return Expr::constant(n.var == var ? 1.0 : 0.0);
      default:
        break;
    }
    const Expr a = e.lhs();
    const Expr da = d(a, var);
    switch (n.op) {
      case Op::Neg:
        return -da;
      case Op::Sqrt:
        return da / (Expr::constant(2.0) * e);
      case Op::Exp:
        return da * e;
      case Op::Log:
        return da / a;
      case Op::Sin:
        return da * cos(a);
      case Op::Cos:
        return -(da * sin(a));
      default:
        break;
    }
    const Expr b = e.rhs();
    switch (n.op) {
      case Op::Add:
        return da + d(b, var);
      case Op::Sub:
        return da - d(b, var);
      case Op::Mul:
        return da * b + a * d(b, var);
      case Op::Div:
        return (da * b - a * d(b, var)) / (b * b);
      case Op::Pow:
        return power_rule(e, a, b, da, var);
      default:
        throw DimensionError("differentiate: unexpected node");
    }
  }

  Expr power_rule(const Expr& e, const Expr& a, const Expr& b, const Expr& da, int var) {
    if (max_variable_index(b) < 0) {
      // Constant exponent, possibly an unfolded subtree such as (-2).
      const double c = evaluate(b, {});
      if (da.is_constant(0.0)) return Expr::constant(0.0);
      return Expr::constant(c) * pow(a, Expr::constant(c - 1.0)) * da;
    }
    const Expr db = d(b, var);
    return e * (db * log(a) + b * da / a);
  }

  std::map<std::pair<const Node*, int>, Expr> memo_;
  std::vector<Expr> inputs_;  // keeps memo keys alive
};

}  // namespace detail

}  // namespace cvxdef
