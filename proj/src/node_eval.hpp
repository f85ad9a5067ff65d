#pragma once

#include <cmath>
#include <string>

#include "cvxdef/errors.hpp"
#include "cvxdef/expr.hpp"

namespace cvxdef::detail {

inline bool is_integer_exponent(double b) { return std::isfinite(b) && std::floor(b) == b && std::abs(b) < 1e9; }

inline std::string describe_node(const Node* node) {
  if (node == nullptr) return "<node>";
  std::string s = to_string(Expr(NodePtr(NodePtr{}, node)));
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

[[noreturn]] inline void domain_failure(const char* what, const Node* node) {
  throw EvalError(std::string(what) + " in node " + describe_node(node));
}

/// Applies one node operation with the runtime domain checks.
inline double apply_op(Op op, double a, double b, const Node* node) {
  double r = 0.0;
  switch (op) {
    case Op::Const:
    case Op::Var:
      return a;
    case Op::Neg:
      r = -a;
      break;
    case Op::Sqrt:
      if (a < 0.0) domain_failure("sqrt of a negative value", node);
      r = std::sqrt(a);
      break;
    case Op::Exp:
      r = std::exp(a);
      break;
    case Op::Log:
      if (!(a > 0.0)) domain_failure("log of a non-positive value", node);
      r = std::log(a);
      break;
    case Op::Sin:
      r = std::sin(a);
      break;
    case Op::Cos:
      r = std::cos(a);
      break;
    case Op::Add:
      r = a + b;
      break;
    case Op::Sub:
      r = a - b;
      break;
    case Op::Mul:
      r = a * b;
      break;
    case Op::Div:
      if (b == 0.0) domain_failure("division by zero", node);
      r = a / b;
      break;
    case Op::Pow:
      if (is_integer_exponent(b)) {
        if (a == 0.0 && b < 0.0) domain_failure("zero raised to a negative power", node);
      } else if (!(a > 0.0)) {
        domain_failure("non-integer power of a non-positive base", node);
      }
      r = std::pow(a, b);
      break;
  }
  if (!std::isfinite(r)) domain_failure("non-finite result", node);
  return r;
}

}  // namespace cvxdef::detail
