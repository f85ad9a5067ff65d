#include "cvxdef/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "cvxdef/errors.hpp"

namespace cvxdef {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  // Scaled to avoid overflow for large coordinates.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

Vector add(std::span<const double> a, std::span<const double> b) { return add_scaled(a, 1.0, b); }

Vector subtract(std::span<const double> a, std::span<const double> b) { return add_scaled(a, -1.0, b); }

Vector scaled(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

Vector add_scaled(std::span<const double> a, double s, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("vector length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::row(std::size_t i) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw DimensionError("Matrix::apply: length mismatch");
  Vector out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * x[j];
  return out;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw DimensionError("Matrix product: shape mismatch");
  Matrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {
  if (n == 0) throw DimensionError("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

SymMatrix SymMatrix::from_dense(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("SymMatrix::from_dense: matrix not square");
  SymMatrix m(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = 0.5 * (a(i, j) + a(j, i));
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> u) {
  SymMatrix m(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = u[i] * u[j];
  return m;
}

Matrix SymMatrix::dense() const {
  Matrix out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(i, j) = (*this)(i, j);
  return out;
}

Vector SymMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionError("SymMatrix::apply: length mismatch");
  Vector out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * x[j];
  return out;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  return std::sqrt(s);
}

bool SymMatrix::is_finite() const { return all_finite(data_); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.n_ != n_) throw DimensionError("SymMatrix +=: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  if (other.n_ != n_) throw DimensionError("SymMatrix -=: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

// ---------------------------------------------------------------------------
// Cyclic Jacobi

EigenDecomposition eigen_decompose(const SymMatrix& m) {
  if (!m.is_finite()) throw NonFiniteError("eigen_decompose: non-finite matrix entry");
  const std::size_t n = m.size();
  Matrix a = m.dense();
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double g = 100.0 * std::abs(apq);
        // Once the off-diagonal entry is below the diagonal's resolution, drop it.
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Vector eigenvalues(const SymMatrix& m) { return eigen_decompose(m).values; }

double min_eigenvalue(const SymMatrix& m) {
  if (m.size() == 1) {
    if (!m.is_finite()) throw NonFiniteError("min_eigenvalue: non-finite matrix entry");
    return m(0, 0);
  }
  return eigen_decompose(m).values.front();
}

double spectral_norm(const SymMatrix& m) {
  const Vector ev = eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

// ---------------------------------------------------------------------------
// Shifted inverse and Neumann series

namespace {

// LDLᵀ factorization without pivoting; empty optional when a pivot is too small.
struct Ldlt {
  Matrix lower;
  Vector diag;
};

std::optional<Ldlt> factor_ldlt(const SymMatrix& a) {
  const std::size_t n = a.size();
  const double scale = std::max(1.0, a.frobenius_norm());
  Ldlt f{Matrix::identity(n), Vector(n, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= f.lower(j, k) * f.lower(j, k) * f.diag[k];
    if (std::abs(d) <= 1e-14 * scale) return std::nullopt;
    f.diag[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= f.lower(i, k) * f.lower(j, k) * f.diag[k];
      f.lower(i, j) = s / d;
    }
  }
  return f;
}

Vector ldlt_solve(const Ldlt& f, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) b[i] -= f.lower(i, k) * b[k];
  for (std::size_t i = 0; i < n; ++i) b[i] /= f.diag[i];
  for (std::size_t ii = n; ii-- > 0;)
    for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= f.lower(k, ii) * b[k];
  return b;
}

Matrix inverse_of(const SymMatrix& a, const EigenDecomposition& eig) {
  const std::size_t n = a.size();
  Matrix inv(n, n);
  if (auto f = factor_ldlt(a)) {
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n, 0.0);
      e[j] = 1.0;
      const Vector col = ldlt_solve(*f, std::move(e));
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
  }
  // Indefinite shift with a vanishing leading pivot: invert through the spectrum.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * eig.vectors(j, k) / eig.values[k];
      inv(i, j) = s;
    }
  return inv;
}

}  // namespace

SymMatrix shifted_inverse_apply(const SymMatrix& h, double delta) {
  if (!h.is_finite() || !std::isfinite(delta)) throw NonFiniteError("shifted_inverse_apply: non-finite input");
  const std::size_t n = h.size();
  SymMatrix a = delta * h;
  a += SymMatrix::identity(n);

  const EigenDecomposition eig = eigen_decompose(a);
  double smallest = std::abs(eig.values.front());
  for (double v : eig.values) smallest = std::min(smallest, std::abs(v));
  if (smallest <= 1e-12) throw SingularShiftError(smallest);

  const Matrix product = h.dense() * inverse_of(a, eig);
  return SymMatrix::from_dense(product);
}

SymMatrix neumann_partial_sum(const SymMatrix& h, double delta, int terms) {
  if (terms < 1) throw DimensionError("neumann_partial_sum: terms must be >= 1");
  if (!h.is_finite() || !std::isfinite(delta)) throw NonFiniteError("neumann_partial_sum: non-finite input");
  const std::size_t n = h.size();
  const Matrix hd = h.dense();
  Matrix power = Matrix::identity(n);  // (−δh)^m
  Matrix sum = Matrix::identity(n);
  for (int m = 1; m < terms; ++m) {
    power = power * hd;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) power(i, j) *= -delta;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum(i, j) += power(i, j);
  }
  return SymMatrix::from_dense(hd * sum);
}

Vector solve_linear(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("solve_linear: shape mismatch");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  if (scale == 0.0) throw NonConvergenceError("solve_linear: zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(pivot, col))) pivot = i;
    if (std::abs(a(pivot, col)) <= 1e-300 + 1e-15 * scale)
      throw NonConvergenceError("solve_linear: singular system");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

}  // namespace cvxdef
