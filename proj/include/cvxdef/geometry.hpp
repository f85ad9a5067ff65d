#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cvxdef/jet.hpp"
#include "cvxdef/linalg.hpp"

namespace cvxdef {

/// Gradients at or below this norm mark a singular point of the defining function.
inline constexpr double kMinGradientNorm = 1e-12;

struct TangentFrame {
  Vector base;
  Vector normal;
  std::vector<Vector> tangent_basis;

  /// n×(n−1) matrix whose columns are the tangent basis.
  Matrix tangent_matrix() const;
};

/// (ξᵀ, ξᴺ): ξᴺ = ⟨∇r,ξ⟩∇r/‖∇r‖², ξᵀ = ξ − ξᴺ.
std::pair<Vector, Vector> tangent_split(std::span<const double> grad, std::span<const double> xi);

/// H(ξ, ζ).
double hessian_form(const SymMatrix& hess, std::span<const double> xi, std::span<const double> zeta);

/// Hessian form of h·r in direction ξ.
double product_hessian(const Jet3& jr, const Jet3& jh, std::span<const double> xi);

/// Hessian form of χ∘r given χ′(r) and χ″(r).
double chain_hessian(const Jet3& jr, double chi1, double chi2, std::span<const double> xi);

/// Normal ∇r/‖∇r‖ and the tangent complement from the Householder reflector
/// that sends e_n to ±ν.
TangentFrame tangent_frame(std::span<const double> grad, std::span<const double> base);

/// Tᵀ·H·T for the frame's tangent basis T.
SymMatrix tangential_block(const SymMatrix& hess, const TangentFrame& frame);

/// P·H·P with P = I − ννᵀ.
SymMatrix project_normal_out(const SymMatrix& hess, std::span<const double> normal);

/// Throws VanishingGradientError if ‖grad‖ ≤ kMinGradientNorm; returns the norm.
double require_gradient(std::span<const double> grad, const char* where);

}  // namespace cvxdef
