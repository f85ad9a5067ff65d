#include <cmath>
#include <string>

#include "cvxdef/convexify.hpp"
#include "cvxdef/rng.hpp"

namespace cvxdef {

IftGraph::IftGraph(std::shared_ptr<const ExprField> r, BoundaryPoint center, Matrix rotation, double patch_radius)
    : r_(std::move(r)), center_(std::move(center)), rotation_(std::move(rotation)), patch_radius_(patch_radius) {
  if (rotation_.rows() != rotation_.cols() || rotation_.rows() != center_.x.size())
    throw DimensionError("IftGraph: rotation must be n×n");
}

Vector IftGraph::to_local(std::span<const double> x) const { return rotation_.apply(subtract(x, center_.x)); }

Vector IftGraph::to_world(std::span<const double> y) const {
  return add(center_.x, rotation_.transpose().apply(y));
}

double IftGraph::f(std::span<const double> y_prime) const {
  const std::size_t n = dim();
  if (y_prime.size() + 1 != n) throw DimensionError("IftGraph::f: expected n-1 coordinates");
  Vector y(y_prime.begin(), y_prime.end());
  y.push_back(0.0);
  const Vector nu = rotation_.row(n - 1);
  for (int it = 0; it < 50; ++it) {
    const Jet3 j = r_->jet(to_world(y), 1);
    const double dn = dot(j.grad, nu);
    if (!(dn > kMinGradientNorm)) throw NonConvergenceError("IftGraph::f: r is not increasing along the normal");
    if (std::abs(j.value) <= 1e-12 * std::max(1.0, norm(j.grad))) return y[n - 1];
    y[n - 1] -= j.value / dn;
    if (!std::isfinite(y[n - 1])) break;
  }
  throw NonConvergenceError("IftGraph::f: Newton did not converge");
}

Jet3 IftGraph::r_local(std::span<const double> y) const {
  return linear_pullback(r_->jet(to_world(y)), rotation_.transpose());
}

Jet3 IftGraph::rho_local(std::span<const double> y) const {
  const std::size_t n = dim();
  const std::size_t m = n - 1;
  if (y.size() != n) throw DimensionError("IftGraph::rho_local: dimension mismatch");
  Vector z(y.begin(), y.end());
  z[m] = f(y.first(m));
  const Jet3 r = r_local(z);
  const double rn = r.grad[m];

  Vector f1(m);
  for (std::size_t j = 0; j < m; ++j) f1[j] = -r.grad[j] / rn;

  SymMatrix f2(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k <= j; ++k) {
      const double e = r.hess(j, k) + r.hess(j, m) * f1[k] + r.hess(k, m) * f1[j] + r.hess(m, m) * f1[j] * f1[k];
      f2.at(j, k) = -e / rn;
    }

  // D_l g = g_l + g_n f_l along the graph.
  auto d2 = [&](std::size_t a, std::size_t b, std::size_t l) { return r.third(a, b, l) + r.third(a, b, m) * f1[l]; };
  SymTensor f3(3, m);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t k = 0; k <= l; ++k)
      for (std::size_t j = 0; j <= k; ++j) {
        const double de = d2(j, k, l) + d2(j, m, l) * f1[k] + r.hess(j, m) * f2(k, l) + d2(k, m, l) * f1[j] +
                          r.hess(k, m) * f2(j, l) + d2(m, m, l) * f1[j] * f1[k] +
                          r.hess(m, m) * (f2(j, l) * f1[k] + f1[j] * f2(k, l));
        const double drn = r.hess(m, l) + r.hess(m, m) * f1[l];
        f3.at(j, k, l) = -(de + f2(j, k) * drn) / rn;
      }

  Jet3 out(n);
  out.value = y[m] - z[m];
  for (std::size_t j = 0; j < m; ++j) out.grad[j] = -f1[j];
  out.grad[m] = 1.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k <= j; ++k) out.hess.at(j, k) = -f2(j, k);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t k = 0; k <= l; ++k)
      for (std::size_t j = 0; j <= k; ++j) out.third.at(j, k, l) = -f3(j, k, l);
  return out;
}

Jet3 IftGraph::rho_world(std::span<const double> x) const { return linear_pullback(rho_local(to_local(x)), rotation_); }

IftGraph ift_local(const DomainSpec& spec, const BoundaryPoint& p, int shrink_budget) {
  const std::size_t n = spec.dim();
  if (n < 2) throw DimensionError("ift_local: needs n >= 2");
  const std::size_t m = n - 1;
  Matrix rot(n, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < n; ++c) rot(i, c) = p.frame.tangent_basis[i][c];
  for (std::size_t c = 0; c < n; ++c) rot(m, c) = p.frame.normal[c];

  for (int k = 0; k <= shrink_budget; ++k) {
    const double radius = spec.collar_radius() / std::pow(2.0, k);
    IftGraph graph(spec.field_ptr(), p, rot, radius);
    std::vector<Vector> probes;
    for (int i = -10; i <= 10; ++i)
      for (std::size_t a = 0; a < m; ++a) {
        Vector y(m, 0.0);
        y[a] = radius * i / 10.0;
        probes.push_back(y);
      }
    for (std::size_t s = 0; s < 32 && m > 1; ++s) {
      Stream st(spec.seed() + 7919, s);
      probes.push_back(scaled(st.unit_vector(m), radius * std::pow(st.uniform(), 1.0 / static_cast<double>(m))));
    }
    bool ok = true;
    for (const Vector& yp : probes) {
      try {
        const double fv = graph.f(yp);
        Vector y = yp;
        y.push_back(fv);
        if (!(std::abs(fv) <= radius) || !(graph.r_local(y).grad[m] > 0.0)) {
          ok = false;
          break;
        }
      } catch (const Error&) {
        ok = false;
        break;
      }
    }
    if (ok) return graph;
  }
  throw NonConvergenceError("ift_local: no patch radius gave a graph after " + std::to_string(shrink_budget) +
                            " halvings");
}

}  // namespace cvxdef
