#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "cvxdef/expr.hpp"
#include "cvxdef/jet.hpp"

namespace cvxdef {

/// Anything that yields a third-order jet at a point.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual std::size_t dim() const = 0;
  virtual Jet3 jet(std::span<const double> x) const = 0;
  virtual double value(std::span<const double> x) const { return jet(x).value; }
  virtual std::string describe() const = 0;
};

/// A parsed expression compiled through fourth order.
class ExprField final : public ScalarField {
 public:
  ExprField(Expr e, std::size_t dim) : program_(e, dim, 4) {}

  std::size_t dim() const override { return program_.dim(); }
  Jet3 jet(std::span<const double> x) const override { return program_.jet(x, 3); }
  Jet3 jet(std::span<const double> x, int order) const { return program_.jet(x, order); }
  Jet4 jet4(std::span<const double> x) const { return program_.jet4(x); }
  double value(std::span<const double> x) const override { return program_.value(x); }
  std::string describe() const override { return to_string(program_.expr()); }

  const Expr& expr() const noexcept { return program_.expr(); }

 private:
  JetProgram program_;
};

}  // namespace cvxdef
