#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvxdef/boundary.hpp"
#include "cvxdef/errors.hpp"
#include "cvxdef/transforms.hpp"
#include "cvxdef/verify.hpp"

namespace cvxdef {

struct PipelineConfig {
  std::size_t boundary_samples = 64;
  std::size_t patch_samples = 256;
  std::size_t directions = 16;
  std::uint64_t seed = 42;
  double safety = 1.25;
  double tolerance = kPsdTolerance;
  double floor = 1e-3;  // lower bound for K, α and β
  std::optional<double> initial_patch_radius;  // defaults to the spec's collar radius
  int shrink_budget = 8;
  int doubling_budget = 10;
  bool allow_fast_path = true;
};

enum class Stage { raw, normalized, boundary_convex, fully_convex, ift_graph };
std::string to_string(Stage stage);

struct ConvexificationResult {
  std::shared_ptr<const ScalarField> transformed;
  std::shared_ptr<const ScalarField> source;  // the input r
  std::shared_ptr<const ScalarField> sigma;   // boundary-convex stage feeding σ̃, when present
  std::optional<double> K;
  std::optional<double> alpha;
  std::optional<double> beta;
  Stage stage = Stage::raw;
  bool fast_path = false;
  std::vector<Report> reports;
  std::vector<BoundaryPoint> samples;
  std::optional<Vector> patch_center;
  std::optional<double> patch_radius;
  std::vector<Vector> verification_points;
};

/// A pipeline step whose verification failed; carries the reports gathered so far.
class VerificationFailure : public Error {
 public:
  VerificationFailure(const std::string& message, std::vector<Report> reports)
      : Error(message), reports_(std::move(reports)) {}

  const std::vector<Report>& reports() const noexcept { return reports_; }

 private:
  std::vector<Report> reports_;
};

/// r₀ = r/‖∇r‖ checked on boundary samples (unit gradient, vanishing mixed terms).
ConvexificationResult normalize_r0(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);
ConvexificationResult normalize_r0(const DomainSpec& spec, std::size_t count = 64);

/// safety·max(ε_K, max over samples of |H_r(ν,ν)|/‖∇r‖).
double choose_K(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double safety,
                double floor = 1e-3);

/// r₁ = r₀ + K·r₀², verified on the r₀ result's samples. Throws VerificationFailure.
ConvexificationResult square_boost(const DomainSpec& spec, const ConvexificationResult& r0, double K,
                                   std::uint64_t seed = 42);

/// min over samples of λ_min of the tangential block of H_r.
double strong_convexity_margin(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);

/// K making H_r + 2K∇r∇rᵀ positive on the boundary when the tangential block is at least `margin`.
double fast_path_K(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double margin, double safety,
                   double floor = 1e-3);

struct AlphaBeta {
  double alpha;
  double beta;
  double C1;
  double C2;
  double m1;
  double m2;
};

/// Fits C₁, C₂ in H_σ(ξ,ξ) ≥ −C₁σ²‖ξ‖² − C₂⟨∇σ,ξ⟩²/‖∇σ‖² over the points and
/// seeded directions, then β = 2C₁·safety, α = (7βm₁ + C₂/m₂)·safety (floored).
AlphaBeta choose_alpha_beta(const ScalarField& sigma, const std::vector<Vector>& points, const PipelineConfig& config);

/// σ̃ = σ + (α + β‖x‖²)σ² on a ball around `center`, shrinking the ball and doubling
/// (α, β) until the sampled Hessian is positive semidefinite. Throws VerificationFailure.
ConvexificationResult full_convexify(const DomainSpec& spec, const BoundaryPoint& center,
                                     const PipelineConfig& config = {});

/// Uniform points in the ball of the given radius (seeded per index).
std::vector<Vector> ball_points(std::span<const double> center, double radius, std::size_t count, std::uint64_t seed);

/// Local graph representation of the boundary near p in rotated coordinates
/// y = R(x − p), where the last row of R is the unit normal at p.
class IftGraph {
 public:
  IftGraph(std::shared_ptr<const ExprField> r, BoundaryPoint center, Matrix rotation, double patch_radius);

  const BoundaryPoint& center() const noexcept { return center_; }
  const Matrix& rotation() const noexcept { return rotation_; }
  double patch_radius() const noexcept { return patch_radius_; }
  std::size_t dim() const noexcept { return rotation_.rows(); }

  Vector to_local(std::span<const double> x) const;
  Vector to_world(std::span<const double> y) const;

  /// f(y′): the last local coordinate of the boundary over y′. Throws NonConvergenceError.
  double f(std::span<const double> y_prime) const;
  /// Jet of r̂(y) = r(p + Rᵀy) in local coordinates.
  Jet3 r_local(std::span<const double> y) const;
  /// Jet of ρ(y) = y_n − f(y′) in local coordinates.
  Jet3 rho_local(std::span<const double> y) const;
  /// Jet of ρ in world coordinates.
  Jet3 rho_world(std::span<const double> x) const;

 private:
  std::shared_ptr<const ExprField> r_;
  BoundaryPoint center_;
  Matrix rotation_;
  double patch_radius_;
};

class IftField final : public ScalarField {
 public:
  explicit IftField(std::shared_ptr<const IftGraph> graph) : graph_(std::move(graph)) {}

  std::size_t dim() const override { return graph_->dim(); }
  Jet3 jet(std::span<const double> x) const override { return graph_->rho_world(x); }
  std::string describe() const override { return "x_n - f(x') near the center"; }

 private:
  std::shared_ptr<const IftGraph> graph_;
};

/// Builds the graph at p, halving the patch radius (up to `shrink_budget` times)
/// until the scalar Newton solve succeeds on a sample grid.
IftGraph ift_local(const DomainSpec& spec, const BoundaryPoint& p, int shrink_budget = 8);

}  // namespace cvxdef
