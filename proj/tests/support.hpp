#pragma once

// Shared oracles for the unit and acceptance tests.

#include <quadmath.h>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cvxdef/errors.hpp"
#include "cvxdef/expr.hpp"
#include "cvxdef/rng.hpp"

namespace cvxdef::testing {

__extension__ typedef __float128 Real;

inline bool finite(Real v) { return finiteq(v) != 0; }
inline Real absq(Real v) { return fabsq(v); }

/// Independent evaluator in quad precision. Returns NaN outside a node's domain;
/// a power whose exponent depends on x needs a positive base.
inline Real eval_ld(const Node& n, std::span<const Real> x) {
  const Real nan = nanq("");
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x[static_cast<std::size_t>(n.var)];
    case Op::Neg: return -eval_ld(*n.a, x);
    case Op::Sqrt: {
      const Real a = eval_ld(*n.a, x);
      return a < 0 ? nan : sqrtq(a);
    }
    case Op::Exp: return expq(eval_ld(*n.a, x));
    case Op::Log: {
      const Real a = eval_ld(*n.a, x);
      return a <= 0 ? nan : logq(a);
    }
    case Op::Sin: return sinq(eval_ld(*n.a, x));
    case Op::Cos: return cosq(eval_ld(*n.a, x));
    case Op::Add: return eval_ld(*n.a, x) + eval_ld(*n.b, x);
    case Op::Sub: return eval_ld(*n.a, x) - eval_ld(*n.b, x);
    case Op::Mul: return eval_ld(*n.a, x) * eval_ld(*n.b, x);
    case Op::Div: {
      const Real b = eval_ld(*n.b, x);
      return b == 0 ? nan : eval_ld(*n.a, x) / b;
    }
    case Op::Pow: {
      const Real a = eval_ld(*n.a, x);
      const Real b = eval_ld(*n.b, x);
      if (a != a || b != b) return nan;  // powq(NaN, 0) would hide an undefined base
      if (max_variable_index(Expr(n.b)) >= 0 || b != floorq(b)) return a <= 0 ? nan : powq(a, b);
      return (a == 0 && b < 0) ? nan : powq(a, b);
    }
  }
  return nan;
}

inline Real eval_ld(const Expr& e, std::span<const Real> x) { return eval_ld(e.node(), x); }

/// Central-difference estimate of ∂_{i1}…∂_{ik} f at x: the product of the
/// one-dimensional central operators, Richardson-extrapolated over (h, h/2).
inline Real fd_partial(const std::function<Real(std::span<const Real>)>& f, std::span<const double> x,
                       const std::vector<std::size_t>& idx, Real h) {
  auto stencil = [&](Real step) {
    const std::size_t k = idx.size();
    Real sum = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      std::vector<Real> y(x.begin(), x.end());
      int sign = 1;
      for (std::size_t m = 0; m < k; ++m) {
        const bool minus = (mask >> m) & 1U;
        y[idx[m]] += minus ? -step : step;
        if (minus) sign = -sign;
      }
      sum += sign * f(y);
    }
    return sum / powq(2 * step, static_cast<Real>(k));
  };
  const Real coarse = stencil(h);
  const Real fine = stencil(h / 2);
  return (4 * fine - coarse) / 3;
}

/// Random expression tree of depth ≤ `depth` over x1..x{dim}.
inline Expr random_expr(Stream& s, std::size_t dim, int depth) {
  if (depth <= 0 || s.uniform() < 0.2) {
    if (s.uniform() < 0.7) return Expr::variable(static_cast<int>(s.uniform() * static_cast<double>(dim)));
    return Expr::constant(std::round(s.uniform(-3.0, 3.0) * 4.0) / 4.0);
  }
  if (s.uniform() < 0.3) {
    static constexpr Op unary[] = {Op::Neg, Op::Sqrt, Op::Exp, Op::Log, Op::Sin, Op::Cos};
    return Expr::make(unary[static_cast<int>(s.uniform() * 6)], random_expr(s, dim, depth - 1));
  }
  static constexpr Op binary[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
  const Op op = binary[static_cast<int>(s.uniform() * 5)];
  if (op != Op::Pow) return Expr::make(op, random_expr(s, dim, depth - 1), random_expr(s, dim, depth - 1));
  const double u = s.uniform();
  Expr exponent;
  if (u < 0.6) {
    static constexpr double ints[] = {-2, -1, 2, 3, 4};
    exponent = Expr::constant(ints[static_cast<int>(s.uniform() * 5)]);
  } else if (u < 0.85) {
    static constexpr double reals[] = {0.5, 1.5, -0.5};
    exponent = Expr::constant(reals[static_cast<int>(s.uniform() * 3)]);
  } else {
    exponent = random_expr(s, dim, depth - 1);
  }
  return Expr::make(Op::Pow, random_expr(s, dim, depth - 1), exponent);
}

inline bool close_rel(double got, Real want, double rel = 1e-6, double abs = 1e-8) {
  const Real tol = rel * absq(want);
  return absq(static_cast<Real>(got) - want) <= (tol > abs ? tol : static_cast<Real>(abs));
}

struct FdComparison {
  bool usable = false;  // oracle finite and moderate at the point
  bool match = false;
  std::string detail;
};

/// Compares every grad/hess/third entry of the library jet against the FD oracle.
/// Pairs where the oracle is non-finite or large (|entry| > 1e4) are marked unusable.
inline FdComparison compare_with_fd(const Expr& e, std::span<const double> x, double h = 1e-4) {
  FdComparison out;
  const std::size_t n = x.size();
  auto f = [&](std::span<const Real> y) { return eval_ld(e, y); };
  std::vector<std::vector<std::size_t>> tuples;
  for (std::size_t i = 0; i < n; ++i) tuples.push_back({i});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) tuples.push_back({i, j});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j <= k; ++j)
      for (std::size_t i = 0; i <= j; ++i) tuples.push_back({i, j, k});

  std::vector<Real> want;
  {
    std::vector<Real> y(x.begin(), x.end());
    const Real v = f(y);
    if (!finite(v) || absq(v) > 1e4) return out;
  }
  for (const auto& t : tuples) {
    const Real d = fd_partial(f, x, t, h);
    if (!finite(d) || absq(d) > 1e4) return out;
    want.push_back(d);
  }
  Jet3 j;
  try {
    j = eval_jet3(e, x);
  } catch (const Error& err) {
    out.usable = true;
    out.detail = std::string("library rejected a point the oracle accepts: ") + err.what();
    return out;
  }
  out.usable = true;
  out.match = true;
  std::size_t slot = 0;
  for (const auto& t : tuples) {
    double got = 0.0;
    if (t.size() == 1) got = j.grad[t[0]];
    if (t.size() == 2) got = j.hess(t[0], t[1]);
    if (t.size() == 3) got = j.third(t[0], t[1], t[2]);
    if (!close_rel(got, want[slot])) {
      out.match = false;
      out.detail = to_string(e) + " order " + std::to_string(t.size()) + ": got " + std::to_string(got) +
                   ", oracle " + std::to_string(static_cast<double>(want[slot]));
      return out;
    }
    ++slot;
  }
  return out;
}

}  // namespace cvxdef::testing
