#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvxdef/boundary.hpp"
#include "cvxdef/field.hpp"

namespace cvxdef {

enum class CheckKind { lower_bound, identity };

/// Outcome of one sampled check. For lower-bound checks pass ⇔ worst_value ≥ −tolerance;
/// for identity checks pass ⇔ |worst_value| ≤ tolerance.
struct Report {
  std::string check_name;
  CheckKind kind = CheckKind::lower_bound;
  std::size_t samples = 0;
  double worst_value = 0.0;
  Vector worst_point;
  std::optional<Vector> worst_direction;
  std::optional<double> worst_point_delta;  // signed distance of worst_point, when computable
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  std::size_t failures = 0;  // samples skipped because a foot point or evaluation failed
  std::map<std::string, double> extras;
};

std::string to_string(CheckKind kind);

inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kSeriesTolerance = 1e-4;

/// min over samples of λ_min of the tangential block of H_r.
Report check_tangential_convexity(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);

/// min over points of λ_min(H) for the given field.
Report check_full_convexity(const ScalarField& field, const std::vector<Vector>& points,
                            const std::string& name = "full_convexity");

/// max ‖H_fd − H_series‖_F / (1 + ‖H_series‖_F) over collar points.
Report check_geomseries(const DomainSpec& spec, const std::vector<Vector>& collar);

/// max |‖∇δ‖ − 1| over collar points; extras carry the b = x − δ∇δ residual.
Report check_eikonal(const DomainSpec& spec, const std::vector<Vector>& collar);

/// max ‖H_series·∇δ‖ over collar points.
Report check_normal_annihilation(const DomainSpec& spec, const std::vector<Vector>& collar);

/// Counts samples where δ and −log(−δ) disagree about being locally convex.
/// Throws DimensionError if a sample is not strictly inside.
Report check_log_convexity_equivalence(const DomainSpec& spec, const std::vector<Vector>& interior);

/// Fits the smallest constants for both Hessian lower bounds on `train` and
/// tests them (×1.01) on `holdout` with seeded random directions.
Report check_threshold_equivalence(const DomainSpec& spec, const ScalarField& sigma, const std::vector<Vector>& train,
                                   const std::vector<Vector>& holdout, std::uint64_t seed);

/// min of H_δ(ξ,ξ)(x) − ½H_δ(ξ,ξ)(b(x)) over exterior points and directions.
Report check_half_bound(const DomainSpec& spec, const std::vector<Vector>& exterior, std::uint64_t seed,
                        std::size_t directions = 16);

/// max |‖∇f‖ − 1| over boundary points.
Report check_unit_gradient(const ScalarField& f, const std::vector<BoundaryPoint>& samples,
                           const std::string& name = "r0_unit_gradient");

/// max |H_f(τ, ∇f)| over boundary points and tangent-basis τ.
Report check_mixed_terms(const ScalarField& f, const std::vector<BoundaryPoint>& samples,
                         const std::string& name = "r0_mixed_terms");

/// max |H_{r₀}(ξ,ξ) − ‖∇r‖⁻¹[H_r(ξᵀ,ξᵀ) − H_r(ξᴺ,ξᴺ)]| over boundary points and directions.
Report check_r0_hessian_identity(const DomainSpec& spec, const ScalarField& r0,
                                 const std::vector<BoundaryPoint>& samples, std::uint64_t seed);

/// min of H_{r₁}(ξ,ξ) − ‖∇r‖⁻¹H_r(ξᵀ,ξᵀ) − K⟨∇r₀,ξ⟩² over boundary points and directions.
Report check_r1_lower_bound(const DomainSpec& spec, const ScalarField& r1, double K,
                            const std::vector<BoundaryPoint>& samples, std::uint64_t seed);

/// max |⟨∇H_σ(τ,τ),∇σ⟩ − H_σ(τ,τ)H_σ(∇σ,∇σ) + H_σ(τ,𝓗τ)| over boundary points and tangent τ.
Report check_sigma_lemma(const ScalarField& sigma, const std::vector<BoundaryPoint>& samples);

/// min over points of σ̃/r (positive multiplier ⇒ same zero set and sign).
Report check_multiplier_positivity(const ScalarField& transformed, const ScalarField& r,
                                   const std::vector<Vector>& points, const std::string& name = "multiplier_positivity");

/// Sets pass from worst_value and kind.
void finalize(Report& report);

/// Directions used by bilinear-bound checks: the given basis plus `count` seeded unit vectors.
std::vector<Vector> test_directions(const std::vector<Vector>& basis, std::size_t n, std::size_t count,
                                    std::uint64_t seed, std::uint64_t index);

}  // namespace cvxdef
