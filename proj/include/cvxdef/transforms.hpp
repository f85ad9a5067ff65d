#pragma once

#include <memory>
#include <span>
#include <string>

#include "cvxdef/field.hpp"

namespace cvxdef {

/// r₀ = r/‖∇r‖, differentiated through the jet algebra from a fourth-order jet of r.
class NormalizedField final : public ScalarField {
 public:
  explicit NormalizedField(std::shared_ptr<const ExprField> r) : r_(std::move(r)) {}

  std::size_t dim() const override { return r_->dim(); }
  Jet3 jet(std::span<const double> x) const override { return normalize_by_gradient(r_->jet4(x)); }
  std::string describe() const override { return "(" + r_->describe() + ") / |grad|"; }

 private:
  std::shared_ptr<const ExprField> r_;
};

/// σ + K·σ².
class SquareBoostField final : public ScalarField {
 public:
  SquareBoostField(std::shared_ptr<const ScalarField> base, double K) : base_(std::move(base)), K_(K) {}

  std::size_t dim() const override { return base_->dim(); }
  Jet3 jet(std::span<const double> x) const override {
    const Jet3 s = base_->jet(x);
    return s + K_ * product(s, s);
  }
  std::string describe() const override { return "s + K*s^2 with s = " + base_->describe(); }
  double K() const noexcept { return K_; }

 private:
  std::shared_ptr<const ScalarField> base_;
  double K_;
};

/// σ + (α + β‖x‖²)·σ².
class WeightedBoostField final : public ScalarField {
 public:
  WeightedBoostField(std::shared_ptr<const ScalarField> base, double alpha, double beta)
      : base_(std::move(base)), alpha_(alpha), beta_(beta) {}

  std::size_t dim() const override { return base_->dim(); }
  Jet3 jet(std::span<const double> x) const override {
    const Jet3 s = base_->jet(x);
    return s + product(quadratic_weight(x, alpha_, beta_), product(s, s));
  }
  std::string describe() const override {
    return "s + (alpha + beta*|x|^2)*s^2 with s = " + base_->describe();
  }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  std::shared_ptr<const ScalarField> base_;
  double alpha_;
  double beta_;
};

}  // namespace cvxdef
