#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cvxdef/linalg.hpp"

namespace cvxdef {

/// Fully symmetric tensor of rank 3 or 4 over ℝⁿ. Only sorted index tuples are
/// stored; the slot of i₀ ≤ i₁ ≤ … is Σ_m C(i_m + m, m + 1).
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(int rank, std::size_t n);

  int rank() const noexcept { return rank_; }
  std::size_t dim() const noexcept { return n_; }
  std::size_t packed_size() const noexcept { return data_.size(); }
  std::span<const double> packed() const noexcept { return data_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const;
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
  double& at(std::size_t i, std::size_t j, std::size_t k);
  double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l);

  static std::size_t packed_size_for(int rank, std::size_t n);

 private:
  std::size_t slot3(std::size_t i, std::size_t j, std::size_t k) const;
  std::size_t slot4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

  int rank_ = 0;
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Value and derivatives through order three at one point. Entries above
/// `order` are zero.
struct Jet3 {
  double value = 0.0;
  Vector grad;
  SymMatrix hess;
  SymTensor third;
  int order = 3;

  Jet3() = default;
  explicit Jet3(std::size_t n, int order = 3);

  std::size_t dim() const noexcept { return grad.size(); }
  static Jet3 constant(std::size_t n, double c);
};

/// Order-four jet; needed wherever a gradient norm is differentiated three times.
struct Jet4 {
  Jet3 low;
  SymTensor fourth;

  Jet4() = default;
  explicit Jet4(std::size_t n);
};

Jet3 operator+(const Jet3& a, const Jet3& b);
Jet3 operator-(const Jet3& a, const Jet3& b);
Jet3 operator*(double s, const Jet3& a);
Jet3 product(const Jet3& a, const Jet3& b);

/// φ∘u given φ(u), φ′(u), φ″(u), φ‴(u).
Jet3 compose(const Jet3& u, double d0, double d1, double d2, double d3);
Jet3 jet_sqrt(const Jet3& u);
Jet3 reciprocal(const Jet3& u);
Jet3 quotient(const Jet3& a, const Jet3& b);

/// Jet of ‖∇f‖².
Jet3 gradient_norm_squared(const Jet4& f);
/// Jet of f/‖∇f‖. Throws VanishingGradientError when ‖∇f‖ ≤ 1e-12.
Jet3 normalize_by_gradient(const Jet4& f);

/// Jet at y = 0 of g(y) = f(a + Q·y), where `f` is the jet of f at a and Q is n×m.
Jet3 linear_pullback(const Jet3& f, const Matrix& q);

/// Jet of α + β‖x‖² at x.
Jet3 quadratic_weight(std::span<const double> x, double alpha, double beta);

/// T(u, v, ·) for a rank-3 tensor.
Vector contract2(const SymTensor& t, std::span<const double> u, std::span<const double> v);
/// T(u, v, w).
double contract3(const SymTensor& t, std::span<const double> u, std::span<const double> v,
                 std::span<const double> w);

}  // namespace cvxdef
