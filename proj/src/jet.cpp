#include "cvxdef/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cvxdef/errors.hpp"
#include "cvxdef/geometry.hpp"

namespace cvxdef {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_same_dim(const Jet3& a, const Jet3& b) {
  if (a.dim() != b.dim()) throw DimensionError("jet dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// SymTensor

SymTensor::SymTensor(int rank, std::size_t n) : rank_(rank), n_(n), data_(packed_size_for(rank, n), 0.0) {
  if (rank != 3 && rank != 4) throw DimensionError("SymTensor: rank must be 3 or 4");
}

std::size_t SymTensor::packed_size_for(int rank, std::size_t n) {
  return binomial(n + static_cast<std::size_t>(rank) - 1, static_cast<std::size_t>(rank));
}

std::size_t SymTensor::slot3(std::size_t i, std::size_t j, std::size_t k) const {
  std::array<std::size_t, 3> s{i, j, k};
  std::sort(s.begin(), s.end());
  return s[0] + binomial(s[1] + 1, 2) + binomial(s[2] + 2, 3);
}

std::size_t SymTensor::slot4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  std::array<std::size_t, 4> s{i, j, k, l};
  std::sort(s.begin(), s.end());
  return s[0] + binomial(s[1] + 1, 2) + binomial(s[2] + 2, 3) + binomial(s[3] + 3, 4);
}

double SymTensor::operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[slot3(i, j, k)]; }

double SymTensor::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  return data_[slot4(i, j, k, l)];
}

double& SymTensor::at(std::size_t i, std::size_t j, std::size_t k) { return data_[slot3(i, j, k)]; }

double& SymTensor::at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  return data_[slot4(i, j, k, l)];
}

// ---------------------------------------------------------------------------
// Jets

Jet3::Jet3(std::size_t n, int order_) : grad(n, 0.0), hess(n), third(3, n), order(order_) {}

Jet3 Jet3::constant(std::size_t n, double c) {
  Jet3 j(n);
  j.value = c;
  return j;
}

Jet4::Jet4(std::size_t n) : low(n), fourth(4, n) {}

Jet3 operator+(const Jet3& a, const Jet3& b) {
  check_same_dim(a, b);
  const std::size_t n = a.dim();
  Jet3 out(n, std::min(a.order, b.order));
  out.value = a.value + b.value;
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = a.grad[i] + b.grad[i];
  out.hess = a.hess + b.hess;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) out.third.at(i, j, k) = a.third(i, j, k) + b.third(i, j, k);
  return out;
}

Jet3 operator*(double s, const Jet3& a) {
  const std::size_t n = a.dim();
  Jet3 out(n, a.order);
  out.value = s * a.value;
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = s * a.grad[i];
  out.hess = s * a.hess;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) out.third.at(i, j, k) = s * a.third(i, j, k);
  return out;
}

Jet3 operator-(const Jet3& a, const Jet3& b) { return a + (-1.0) * b; }

Jet3 product(const Jet3& a, const Jet3& b) {
  check_same_dim(a, b);
  const std::size_t n = a.dim();
  Jet3 out(n, std::min(a.order, b.order));
  out.value = a.value * b.value;
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      out.hess.at(i, j) = a.hess(i, j) * b.value + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] +
                          a.value * b.hess(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        out.third.at(i, j, k) = a.third(i, j, k) * b.value + a.hess(i, j) * b.grad[k] + a.hess(i, k) * b.grad[j] +
                                a.hess(j, k) * b.grad[i] + a.grad[i] * b.hess(j, k) + a.grad[j] * b.hess(i, k) +
                                a.grad[k] * b.hess(i, j) + a.value * b.third(i, j, k);
  return out;
}

Jet3 compose(const Jet3& u, double d0, double d1, double d2, double d3) {
  const std::size_t n = u.dim();
  Jet3 out(n, u.order);
  out.value = d0;
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = d1 * u.grad[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out.hess.at(i, j) = d1 * u.hess(i, j) + d2 * u.grad[i] * u.grad[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        out.third.at(i, j, k) =
            d1 * u.third(i, j, k) +
            d2 * (u.hess(i, j) * u.grad[k] + u.hess(i, k) * u.grad[j] + u.hess(j, k) * u.grad[i]) +
            d3 * u.grad[i] * u.grad[j] * u.grad[k];
  return out;
}

Jet3 jet_sqrt(const Jet3& u) {
  if (!(u.value > 0.0)) throw EvalError("jet_sqrt: argument must be positive");
  const double s = std::sqrt(u.value);
  return compose(u, s, 0.5 / s, -0.25 / (s * u.value), 0.375 / (s * u.value * u.value));
}

Jet3 reciprocal(const Jet3& u) {
  if (u.value == 0.0) throw EvalError("reciprocal: division by zero");
  const double v = 1.0 / u.value;
  return compose(u, v, -v * v, 2.0 * v * v * v, -6.0 * v * v * v * v);
}

Jet3 quotient(const Jet3& a, const Jet3& b) { return product(a, reciprocal(b)); }

Jet3 gradient_norm_squared(const Jet4& f) {
  const Jet3& r = f.low;
  const std::size_t n = r.dim();
  Jet3 g(n, r.order);
  for (std::size_t i = 0; i < n; ++i) g.value += r.grad[i] * r.grad[i];
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.grad[i] * r.hess(i, a);
    g.grad[a] = 2.0 * s;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += r.hess(i, a) * r.hess(i, b) + r.grad[i] * r.third(i, a, b);
      g.hess.at(a, b) = 2.0 * s;
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          s += r.third(i, b, c) * r.hess(i, a) + r.hess(i, b) * r.third(i, a, c) + r.hess(i, c) * r.third(i, a, b) +
               r.grad[i] * f.fourth(i, a, b, c);
        g.third.at(a, b, c) = 2.0 * s;
      }
  return g;
}

Jet3 normalize_by_gradient(const Jet4& f) {
  const Jet3 g = gradient_norm_squared(f);
  const double len = std::sqrt(g.value);
  if (!(len > kMinGradientNorm)) throw VanishingGradientError("normalize_by_gradient", len);
  // φ(t) = t^{-1/2}
  const double t = g.value;
  const double d0 = 1.0 / len;
  const double d1 = -0.5 * d0 / t;
  const double d2 = 0.75 * d0 / (t * t);
  const double d3 = -1.875 * d0 / (t * t * t);
  Jet3 out = product(f.low, compose(g, d0, d1, d2, d3));
  out.order = f.low.order;
  return out;
}

Jet3 linear_pullback(const Jet3& f, const Matrix& q) {
  const std::size_t n = f.dim();
  if (q.rows() != n) throw DimensionError("linear_pullback: Q must have n rows");
  const std::size_t m = q.cols();
  Jet3 out(m, f.order);
  out.value = f.value;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < n; ++i) out.grad[a] += q(i, a) * f.grad[i];

  // Contract one index at a time: H·Q, then Qᵀ·(H·Q).
  Matrix hq(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < m; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += f.hess(i, j) * q(j, b);
      hq(i, b) = s;
    }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += q(i, a) * hq(i, b);
      out.hess.at(a, b) = s;
    }

  if (f.order >= 3) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b)
        for (std::size_t c = b; c < m; ++c) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
              for (std::size_t k = 0; k < n; ++k) s += f.third(i, j, k) * q(i, a) * q(j, b) * q(k, c);
          out.third.at(a, b, c) = s;
        }
  }
  return out;
}

Jet3 quadratic_weight(std::span<const double> x, double alpha, double beta) {
  const std::size_t n = x.size();
  Jet3 out(n);
  out.value = alpha + beta * dot(x, x);
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[i] = 2.0 * beta * x[i];
    out.hess.at(i, i) = 2.0 * beta;
  }
  return out;
}

Vector contract2(const SymTensor& t, std::span<const double> u, std::span<const double> v) {
  const std::size_t n = t.dim();
  if (u.size() != n || v.size() != n) throw DimensionError("contract2: length mismatch");
  Vector out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[k] += t(i, j, k) * u[i] * v[j];
  return out;
}

double contract3(const SymTensor& t, std::span<const double> u, std::span<const double> v,
                 std::span<const double> w) {
  return dot(contract2(t, u, v), w);
}

}  // namespace cvxdef
