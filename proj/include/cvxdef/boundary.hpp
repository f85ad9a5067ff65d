#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvxdef/domain.hpp"
#include "cvxdef/geometry.hpp"

namespace cvxdef {

struct BoundaryPoint {
  Vector x;
  TangentFrame frame;
  double residual = 0.0;  // |r(x)|
};

struct FootPointResult {
  Vector b;
  double delta = 0.0;
  int iterations = 0;
  double constraint_residual = 0.0;
  double stationarity_residual = 0.0;
  Vector normal;  // unit outward normal at b
};

/// Frame and residual at a point already on (or numerically at) the boundary.
BoundaryPoint make_boundary_point(const DomainSpec& spec, std::span<const double> x);

/// Newton steps x ← x − r∇r/‖∇r‖² until |r| ≤ 1e-12·max(1, ‖∇r‖).
BoundaryPoint project_to_boundary(const DomainSpec& spec, std::span<const double> x0);

/// `count` distinct boundary points obtained by projecting uniform draws from
/// the box (the spec region by default). Throws BoundaryNotFoundError.
std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec, std::size_t count, std::uint64_t seed);
std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec, std::size_t count, std::uint64_t seed,
                                           const Box& box);

/// Nearest boundary point by Lagrange–Newton. Throws OutsideCollarError when
/// |δ| exceeds the spec's collar radius.
FootPointResult foot_point(const DomainSpec& spec, std::span<const double> x);
/// Same solve without the collar check.
FootPointResult foot_point_unchecked(const DomainSpec& spec, std::span<const double> x);

Vector grad_delta(const DomainSpec& spec, std::span<const double> x);

/// P·H_{r₀}·P at a boundary point, r₀ = r/‖∇r‖, P = I − ννᵀ.
SymMatrix hessian_delta_boundary(const DomainSpec& spec, const BoundaryPoint& p);

/// H_b·(I + δH_b)⁻¹ with H_b the boundary Hessian at the foot point.
SymMatrix hessian_delta_series(const DomainSpec& spec, std::span<const double> x);

/// Central second differences of δ, Richardson-extrapolated over (h, h/2).
/// Default h = 1e-3·(1 + ‖x‖).
SymMatrix hessian_delta_fd(const DomainSpec& spec, std::span<const double> x, std::optional<double> h = std::nullopt);

/// Points b + t·ν with t uniform in [t_lo, t_hi], one per base point.
std::vector<Vector> collar_points(const std::vector<BoundaryPoint>& base, double t_lo, double t_hi,
                                  std::uint64_t seed);

}  // namespace cvxdef
