#include "cvxdef/geometry.hpp"

#include <cmath>

#include "cvxdef/errors.hpp"

namespace cvxdef {

double require_gradient(std::span<const double> grad, const char* where) {
  const double g = norm(grad);
  if (!(g > kMinGradientNorm)) throw VanishingGradientError(where, g);
  return g;
}

Matrix TangentFrame::tangent_matrix() const {
  const std::size_t n = normal.size();
  Matrix t(n, tangent_basis.size());
  for (std::size_t k = 0; k < tangent_basis.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) t(i, k) = tangent_basis[k][i];
  return t;
}

std::pair<Vector, Vector> tangent_split(std::span<const double> grad, std::span<const double> xi) {
  if (grad.size() != xi.size()) throw DimensionError("tangent_split: length mismatch");
  const double g = require_gradient(grad, "tangent_split");
  Vector xn = scaled(grad, dot(grad, xi) / (g * g));
  Vector xt = subtract(xi, xn);
  return {std::move(xt), std::move(xn)};
}

double hessian_form(const SymMatrix& hess, std::span<const double> xi, std::span<const double> zeta) {
  if (xi.size() != hess.size() || zeta.size() != hess.size()) throw DimensionError("hessian_form: length mismatch");
  return dot(hess.apply(xi), zeta);
}

double product_hessian(const Jet3& jr, const Jet3& jh, std::span<const double> xi) {
  if (jr.dim() != jh.dim() || xi.size() != jr.dim()) throw DimensionError("product_hessian: dimension mismatch");
  return jh.value * hessian_form(jr.hess, xi, xi) + 2.0 * dot(jh.grad, xi) * dot(jr.grad, xi) +
         jr.value * hessian_form(jh.hess, xi, xi);
}

double chain_hessian(const Jet3& jr, double chi1, double chi2, std::span<const double> xi) {
  const double g = dot(jr.grad, xi);
  return chi1 * hessian_form(jr.hess, xi, xi) + chi2 * g * g;
}

TangentFrame tangent_frame(std::span<const double> grad, std::span<const double> base) {
  const std::size_t n = grad.size();
  if (base.size() != n) throw DimensionError("tangent_frame: length mismatch");
  const double g = require_gradient(grad, "tangent_frame");
  TangentFrame frame;
  frame.base.assign(base.begin(), base.end());
  frame.normal = scaled(grad, 1.0 / g);

  // v = e_n ± ν with the sign chosen away from cancellation; H = I − 2vvᵀ/‖v‖².
  const Vector& nu = frame.normal;
  Vector v = nu;
  const double sign = nu[n - 1] >= 0.0 ? 1.0 : -1.0;
  for (double& c : v) c *= sign;
  v[n - 1] += 1.0;
  const double vv = dot(v, v);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Vector col(n, 0.0);
    col[k] = 1.0;
    const double f = 2.0 * v[k] / vv;
    for (std::size_t i = 0; i < n; ++i) col[i] -= f * v[i];
    frame.tangent_basis.push_back(std::move(col));
  }
  return frame;
}

SymMatrix tangential_block(const SymMatrix& hess, const TangentFrame& frame) {
  const std::size_t m = frame.tangent_basis.size();
  if (m == 0) throw DimensionError("tangential_block: one-dimensional frame has no tangent directions");
  SymMatrix out(m);
  for (std::size_t a = 0; a < m; ++a) {
    const Vector ha = hess.apply(frame.tangent_basis[a]);
    for (std::size_t b = 0; b <= a; ++b) out.at(a, b) = dot(ha, frame.tangent_basis[b]);
  }
  return out;
}

SymMatrix project_normal_out(const SymMatrix& hess, std::span<const double> normal) {
  const std::size_t n = hess.size();
  if (normal.size() != n) throw DimensionError("project_normal_out: length mismatch");
  Matrix p = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) -= normal[i] * normal[j];
  return SymMatrix::from_dense(p * hess.dense() * p);
}

}  // namespace cvxdef
