#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cvxdef {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
/// a + s·b
Vector add_scaled(std::span<const double> a, double s, std::span<const double> b);
bool all_finite(std::span<const double> a);

/// Dense row-major matrix for the non-symmetric intermediates (rotations, KKT systems).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  Vector row(std::size_t i) const;
  Vector column(std::size_t j) const;
  Matrix transpose() const;
  Vector apply(std::span<const double> x) const;
  Matrix operator*(const Matrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Small dense symmetric matrix, lower triangle stored packed (n(n+1)/2 entries).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Symmetrizes: entry (i,j) = (a(i,j) + a(j,i)) / 2.
  static SymMatrix from_dense(const Matrix& a);
  static SymMatrix outer(std::span<const double> u);

  std::size_t size() const noexcept { return n_; }
  std::size_t packed_size() const noexcept { return data_.size(); }
  std::span<const double> packed() const noexcept { return data_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  Matrix dense() const;
  Vector apply(std::span<const double> x) const;
  double frobenius_norm() const;
  bool is_finite() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// Eigenvalues ascending; column k of `vectors` is the unit eigenvector for values[k].
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations run to convergence. Throws NonFiniteError on NaN/inf entries.
EigenDecomposition eigen_decompose(const SymMatrix& m);
Vector eigenvalues(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);
/// Largest |eigenvalue| (spectral norm).
double spectral_norm(const SymMatrix& m);

/// h·(I + delta·h)⁻¹, symmetrized. Throws SingularShiftError when the smallest
/// singular value of I + delta·h is ≤ 1e-12.
SymMatrix shifted_inverse_apply(const SymMatrix& h, double delta);

/// h·Σ_{m=0}^{terms-1} (−delta)^m h^m.
SymMatrix neumann_partial_sum(const SymMatrix& h, double delta, int terms);

/// Solves a·x = b by Gaussian elimination with partial pivoting. Throws
/// NonConvergenceError if a pivot underflows.
Vector solve_linear(Matrix a, Vector b);

}  // namespace cvxdef
