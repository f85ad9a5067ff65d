#include "cvxdef/boundary.hpp"

#include <cmath>

#include "cvxdef/errors.hpp"
#include "cvxdef/rng.hpp"

namespace cvxdef {

namespace {

constexpr int kProjectionIterations = 50;
constexpr int kFootPointIterations = 50;
constexpr double kDedupRadius = 1e-6;
constexpr double kSaddleTolerance = 1e-8;

}  // namespace

BoundaryPoint make_boundary_point(const DomainSpec& spec, std::span<const double> x) {
  const Jet3 j = spec.field().jet(x, 1);
  BoundaryPoint p;
  p.x.assign(x.begin(), x.end());
  p.frame = tangent_frame(j.grad, x);
  p.residual = std::abs(j.value);
  return p;
}

BoundaryPoint project_to_boundary(const DomainSpec& spec, std::span<const double> x0) {
  if (x0.size() != spec.dim()) throw DimensionError("project_to_boundary: point has wrong dimension");
  Vector y(x0.begin(), x0.end());
  for (int it = 0; it <= kProjectionIterations; ++it) {
    const Jet3 j = spec.field().jet(y, 1);
    const double g = require_gradient(j.grad, "project_to_boundary");
    if (std::abs(j.value) <= 1e-12 * std::max(1.0, g)) {
      BoundaryPoint p;
      p.frame = tangent_frame(j.grad, y);
      p.residual = std::abs(j.value);
      p.x = std::move(y);
      return p;
    }
    if (it == kProjectionIterations) break;
    y = add_scaled(y, -j.value / (g * g), j.grad);
    if (!all_finite(y)) break;
  }
  throw NonConvergenceError("project_to_boundary: no convergence in " + std::to_string(kProjectionIterations) +
                            " iterations");
}

std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec, std::size_t count, std::uint64_t seed) {
  return sample_boundary(spec, count, seed, spec.region());
}

std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec, std::size_t count, std::uint64_t seed,
                                           const Box& box) {
  if (count == 0) throw DimensionError("sample_boundary: count must be at least 1");
  if (box.dim() != spec.dim()) throw DimensionError("sample_boundary: box has wrong dimension");
  std::vector<BoundaryPoint> out;
  const std::size_t attempts = 100 * count;
  for (std::size_t a = 0; a < attempts && out.size() < count; ++a) {
    Stream s(seed, a);
    Vector x(spec.dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.uniform(box.lo[i], box.hi[i]);
    BoundaryPoint p;
    try {
      p = project_to_boundary(spec, x);
    } catch (const Error&) {
      continue;
    }
    if (!box.contains(p.x)) continue;
    bool duplicate = false;
    for (const BoundaryPoint& q : out)
      if (norm(subtract(p.x, q.x)) <= kDedupRadius) {
        duplicate = true;
        break;
      }
    if (!duplicate) out.push_back(std::move(p));
  }
  if (out.size() < count)
    throw BoundaryNotFoundError("boundary not found in region: " + std::to_string(out.size()) + " of " +
                                std::to_string(count) + " points after " + std::to_string(attempts) + " attempts");
  return out;
}

FootPointResult foot_point_unchecked(const DomainSpec& spec, std::span<const double> x) {
  const std::size_t n = spec.dim();
  if (x.size() != n) throw DimensionError("foot_point: point has wrong dimension");
  const ExprField& field = spec.field();
  const double rx = field.value(x);

  Vector y = project_to_boundary(spec, x).x;
  Jet3 j = field.jet(y, 2);
  double g = require_gradient(j.grad, "foot_point");
  double lambda = dot(subtract(y, x), j.grad) / (g * g);

  const double scale = 1.0 + norm(x);
  FootPointResult res;
  bool converged = false;
  for (int it = 0; it <= kFootPointIterations; ++it) {
    const Vector stat = add_scaled(subtract(y, x), -lambda, j.grad);
    res.iterations = it;
    res.constraint_residual = std::abs(j.value);
    res.stationarity_residual = norm(stat);
    if (res.constraint_residual <= 1e-13 * std::max(1.0, g) && res.stationarity_residual <= 1e-13 * scale) {
      converged = true;
      break;
    }
    if (it == kFootPointIterations) break;

    Matrix kkt(n + 1, n + 1);
    Vector rhs(n + 1);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) kkt(a, b) = (a == b ? 1.0 : 0.0) - lambda * j.hess(a, b);
      kkt(a, n) = -j.grad[a];
      kkt(n, a) = j.grad[a];
      rhs[a] = -stat[a];
    }
    rhs[n] = -j.value;
    const Vector step = solve_linear(std::move(kkt), std::move(rhs));
    double step_norm = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      y[a] += step[a];
      step_norm += step[a] * step[a];
    }
    lambda += step[n];
    if (!all_finite(y) || !std::isfinite(lambda)) break;
    j = field.jet(y, 2);
    g = require_gradient(j.grad, "foot_point");
    // Round-off floor: a step far below the coordinates' resolution means we are done.
    if (std::sqrt(step_norm) <= 1e-15 * (1.0 + norm(y)) && std::abs(j.value) <= 1e-10 * std::max(1.0, g)) {
      res.iterations = it + 1;
      res.constraint_residual = std::abs(j.value);
      res.stationarity_residual = norm(add_scaled(subtract(y, x), -lambda, j.grad));
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergenceError("foot_point: Lagrange-Newton did not converge");

  res.normal = scaled(j.grad, 1.0 / g);
  if (n > 1) {
    const TangentFrame frame = tangent_frame(j.grad, y);
    SymMatrix m = SymMatrix::identity(n);
    m -= lambda * j.hess;
    const double reduced = min_eigenvalue(tangential_block(m, frame));
    if (reduced < -kSaddleTolerance)
      throw SaddlePointError("foot_point: critical point is not a distance minimum (reduced Hessian eigenvalue " +
                             std::to_string(reduced) + ")");
  }
  const double dist = norm(subtract(y, x));
  res.delta = rx > 0.0 ? dist : rx < 0.0 ? -dist : 0.0;
  res.b = std::move(y);
  return res;
}

FootPointResult foot_point(const DomainSpec& spec, std::span<const double> x) {
  FootPointResult res = foot_point_unchecked(spec, x);
  if (std::abs(res.delta) > spec.collar_radius())
    throw OutsideCollarError("foot_point: |delta| = " + std::to_string(std::abs(res.delta)) +
                             " exceeds collar radius " + std::to_string(spec.collar_radius()));
  return res;
}

Vector grad_delta(const DomainSpec& spec, std::span<const double> x) { return foot_point(spec, x).normal; }

SymMatrix hessian_delta_boundary(const DomainSpec& spec, const BoundaryPoint& p) {
  const Jet3 r0 = normalize_by_gradient(spec.field().jet4(p.x));
  return project_normal_out(r0.hess, p.frame.normal);
}

SymMatrix hessian_delta_series(const DomainSpec& spec, std::span<const double> x) {
  const FootPointResult fp = foot_point(spec, x);
  const BoundaryPoint bp = make_boundary_point(spec, fp.b);
  return shifted_inverse_apply(hessian_delta_boundary(spec, bp), fp.delta);
}

namespace {

SymMatrix second_differences(const DomainSpec& spec, std::span<const double> x, double h) {
  const std::size_t n = x.size();
  auto delta_at = [&](std::size_t i, double si, std::size_t j, double sj) {
    Vector y(x.begin(), x.end());
    y[i] += si * h;
    y[j] += sj * h;
    return foot_point_unchecked(spec, y).delta;
  };
  const double d0 = foot_point_unchecked(spec, x).delta;
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector yp(x.begin(), x.end()), ym(x.begin(), x.end());
    yp[i] += h;
    ym[i] -= h;
    out.at(i, i) = (foot_point_unchecked(spec, yp).delta - 2.0 * d0 + foot_point_unchecked(spec, ym).delta) / (h * h);
    for (std::size_t j = 0; j < i; ++j)
      out.at(i, j) = (delta_at(i, 1, j, 1) - delta_at(i, 1, j, -1) - delta_at(i, -1, j, 1) + delta_at(i, -1, j, -1)) /
                     (4.0 * h * h);
  }
  return out;
}

}  // namespace

SymMatrix hessian_delta_fd(const DomainSpec& spec, std::span<const double> x, std::optional<double> h) {
  if (x.size() != spec.dim()) throw DimensionError("hessian_delta_fd: point has wrong dimension");
  const double step = h.value_or(1e-3 * (1.0 + norm(x)));
  if (!(step > 0.0)) throw DimensionError("hessian_delta_fd: step must be positive");
  const SymMatrix coarse = second_differences(spec, x, step);
  const SymMatrix fine = second_differences(spec, x, 0.5 * step);
  SymMatrix out = (4.0 / 3.0) * fine;
  out -= (1.0 / 3.0) * coarse;
  return out;
}

std::vector<Vector> collar_points(const std::vector<BoundaryPoint>& base, double t_lo, double t_hi,
                                  std::uint64_t seed) {
  std::vector<Vector> out;
  out.reserve(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    Stream s(seed, k);
    const double t = s.uniform(t_lo, t_hi);
    out.push_back(add_scaled(base[k].x, t, base[k].frame.normal));
  }
  return out;
}

}  // namespace cvxdef
