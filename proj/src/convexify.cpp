#include "cvxdef/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvxdef/rng.hpp"

namespace cvxdef {

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::raw: return "raw";
    case Stage::normalized: return "normalized";
    case Stage::boundary_convex: return "boundary_convex";
    case Stage::fully_convex: return "fully_convex";
    case Stage::ift_graph: return "ift_graph";
  }
  return "unknown";
}

namespace {

std::vector<Vector> points_of(const std::vector<BoundaryPoint>& samples) {
  std::vector<Vector> out;
  out.reserve(samples.size());
  for (const BoundaryPoint& p : samples) out.push_back(p.x);
  return out;
}

// Box of half-width `radius` around c, clipped to the region when they overlap.
Box local_box(const DomainSpec& spec, std::span<const double> c, double radius) {
  Box box{Vector(c.begin(), c.end()), Vector(c.begin(), c.end())};
  for (std::size_t i = 0; i < c.size(); ++i) {
    box.lo[i] = std::max(c[i] - radius, spec.region().lo[i]);
    box.hi[i] = std::min(c[i] + radius, spec.region().hi[i]);
    if (!(box.lo[i] < box.hi[i])) {
      box.lo[i] = c[i] - radius;
      box.hi[i] = c[i] + radius;
    }
  }
  return box;
}

}  // namespace

ConvexificationResult normalize_r0(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
  ConvexificationResult out;
  out.source = spec.field_ptr();
  out.transformed = std::make_shared<NormalizedField>(spec.field_ptr());
  out.stage = Stage::normalized;
  out.samples = samples;
  out.reports.push_back(check_unit_gradient(*out.transformed, samples));
  out.reports.push_back(check_mixed_terms(*out.transformed, samples));
  for (const Report& r : out.reports)
    if (!r.pass) throw VerificationFailure("normalization check '" + r.check_name + "' failed", out.reports);
  return out;
}

ConvexificationResult normalize_r0(const DomainSpec& spec, std::size_t count) {
  return normalize_r0(spec, sample_boundary(spec, count, spec.seed()));
}

double choose_K(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double safety, double floor) {
  double worst = 0.0;
  for (const BoundaryPoint& p : samples) {
    const Jet3 j = spec.field().jet(p.x, 2);
    const double g = require_gradient(j.grad, "choose_K");
    const Vector nu = scaled(j.grad, 1.0 / g);
    worst = std::max(worst, std::abs(hessian_form(j.hess, nu, nu)) / g);
  }
  return safety * std::max(floor, worst);
}

ConvexificationResult square_boost(const DomainSpec& spec, const ConvexificationResult& r0, double K,
                                   std::uint64_t seed) {
  if (!(K > 0.0)) throw DimensionError("square_boost: K must be positive");
  ConvexificationResult out;
  out.source = r0.source ? r0.source : spec.field_ptr();
  out.transformed = std::make_shared<SquareBoostField>(r0.transformed, K);
  out.sigma = out.transformed;
  out.K = K;
  out.stage = Stage::boundary_convex;
  out.samples = r0.samples;
  out.reports = r0.reports;
  out.reports.push_back(check_full_convexity(*out.transformed, points_of(r0.samples), "r1_boundary_psd"));
  out.reports.push_back(check_r1_lower_bound(spec, *out.transformed, K, r0.samples, seed));
  for (const Report& r : out.reports)
    if (!r.pass) throw VerificationFailure("boundary convexity check '" + r.check_name + "' failed", out.reports);
  return out;
}

double strong_convexity_margin(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
  if (samples.empty()) throw DimensionError("strong_convexity_margin: no samples");
  double margin = std::numeric_limits<double>::infinity();
  for (const BoundaryPoint& p : samples) {
    const Jet3 j = spec.field().jet(p.x, 2);
    margin = std::min(margin, min_eigenvalue(tangential_block(j.hess, tangent_frame(j.grad, p.x))));
  }
  return margin;
}

double fast_path_K(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double margin, double safety,
                   double floor) {
  if (!(margin > 0.0)) throw DimensionError("fast_path_K: margin must be positive");
  double worst = 0.0;
  for (const BoundaryPoint& p : samples) {
    const Jet3 j = spec.field().jet(p.x, 2);
    const double g = require_gradient(j.grad, "fast_path_K");
    const double h = spectral_norm(j.hess);
    // 2cH(τ,ν) absorbed as (m/2)|τ|² + (2‖H‖²/m)c².
    worst = std::max(worst, (2.0 * h * h / margin + h) / (2.0 * g * g));
  }
  return safety * std::max(floor, worst);
}

std::vector<Vector> ball_points(std::span<const double> center, double radius, std::size_t count,
                                std::uint64_t seed) {
  const std::size_t n = center.size();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Stream s(seed, k);
    const Vector dir = s.unit_vector(n);
    const double t = radius * std::pow(s.uniform(), 1.0 / static_cast<double>(n));
    out.push_back(add_scaled(center, t, dir));
  }
  return out;
}

AlphaBeta choose_alpha_beta(const ScalarField& sigma, const std::vector<Vector>& points,
                            const PipelineConfig& config) {
  struct Row {
    double v, a, b;
  };
  std::vector<Row> rows;
  double m1 = 0.0;
  double m2 = std::numeric_limits<double>::infinity();
  const std::size_t n = sigma.dim();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector& x = points[k];
    Jet3 j;
    try {
      j = sigma.jet(x);
    } catch (const Error&) {
      continue;
    }
    const double g2 = dot(j.grad, j.grad);
    if (!(g2 > 0.0)) continue;
    m1 = std::max(m1, dot(x, x));
    m2 = std::min(m2, g2);
    const EigenDecomposition eig = eigen_decompose(j.hess);
    std::vector<Vector> basis;
    for (std::size_t c = 0; c < n; ++c) basis.push_back(eig.vectors.column(c));
    basis.push_back(scaled(j.grad, 1.0 / std::sqrt(g2)));
    for (const Vector& xi : test_directions(basis, n, config.directions, config.seed ^ 0xA5A5ULL, k)) {
      const double xx = dot(xi, xi);
      const double v = hessian_form(j.hess, xi, xi) + config.tolerance * xx;
      if (v >= 0.0) continue;
      const double gx = dot(j.grad, xi);
      rows.push_back({v, j.value * j.value * xx, gx * gx / g2});
    }
  }
  if (!std::isfinite(m2) || m2 < 1e-24) m2 = 1e-24;

  // C₂ as a function of C₁: smallest value meeting every row with a usable normal part.
  double c1_lo = 0.0;
  double c1_hi = 0.0;
  for (const Row& r : rows) {
    if (r.a > 0.0) c1_hi = std::max(c1_hi, -r.v / r.a);
    if (r.b <= 1e-14 && r.a > 0.0) c1_lo = std::max(c1_lo, -r.v / r.a);
  }
  c1_hi = std::max(c1_hi, c1_lo);
  auto c2_of = [&](double c1) {
    double c2 = 0.0;
    for (const Row& r : rows) {
      const double need = -(r.v + c1 * r.a);
      if (need <= 0.0) continue;
      if (r.b > 1e-14) c2 = std::max(c2, need / r.b);
    }
    return c2;
  };
  auto objective = [&](double c1) { return 14.0 * m1 * c1 + c2_of(c1) / m2; };

  double lo = c1_lo;
  double hi = c1_hi;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (objective(a) <= objective(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  double c1 = 0.5 * (lo + hi);
  // Endpoints are candidates too; the objective is piecewise linear.
  for (double cand : {c1_lo, c1_hi})
    if (objective(cand) < objective(c1)) c1 = cand;
  const double c2 = c2_of(c1);

  AlphaBeta out{};
  out.C1 = c1;
  out.C2 = c2;
  out.m1 = m1;
  out.m2 = m2;
  out.beta = std::max(config.floor, 2.0 * c1 * config.safety);
  out.alpha = std::max(config.floor, (7.0 * out.beta * m1 + c2 / m2) * config.safety);
  return out;
}

ConvexificationResult full_convexify(const DomainSpec& spec, const BoundaryPoint& center,
                                     const PipelineConfig& config) {
  const double r_init = config.initial_patch_radius.value_or(spec.collar_radius());
  ConvexificationResult out;
  out.source = spec.field_ptr();
  out.patch_center = center.x;

  std::vector<BoundaryPoint> samples{center};
  for (BoundaryPoint& p : sample_boundary(spec, config.boundary_samples, config.seed, local_box(spec, center.x, r_init)))
    samples.push_back(std::move(p));
  out.samples = samples;

  Report tangential = check_tangential_convexity(spec, samples);
  out.reports.push_back(tangential);
  if (!tangential.pass) throw VerificationFailure("tangential convexity pre-check failed", out.reports);

  const double margin = strong_convexity_margin(spec, samples);
  out.reports.back().extras["strong_convexity_margin"] = margin;
  std::shared_ptr<const ScalarField> sigma;
  if (config.allow_fast_path && margin > 1e-6) {
    const double K = fast_path_K(spec, samples, margin, config.safety, config.floor);
    sigma = std::make_shared<SquareBoostField>(spec.field_ptr(), K);
    out.K = K;
    out.fast_path = true;
    Report psd = check_full_convexity(*sigma, points_of(samples), "r1_boundary_psd");
    out.reports.push_back(psd);
    if (!psd.pass) throw VerificationFailure("boundary convexity of r + K r^2 failed", out.reports);
  } else {
    const ConvexificationResult r0 = normalize_r0(spec, samples);
    const double K = choose_K(spec, samples, config.safety, config.floor);
    ConvexificationResult r1;
    try {
      r1 = square_boost(spec, r0, K, config.seed);
    } catch (const VerificationFailure& e) {
      std::vector<Report> reports = out.reports;
      reports.insert(reports.end(), e.reports().begin(), e.reports().end());
      throw VerificationFailure(e.what(), reports);
    }
    sigma = r1.transformed;
    out.K = K;
    out.reports.insert(out.reports.end(), r1.reports.begin(), r1.reports.end());
  }
  out.sigma = sigma;
  const std::size_t fixed_reports = out.reports.size();

  std::vector<Report> last;
  for (int k = 0; k <= config.shrink_budget; ++k) {
    const double radius = r_init / std::pow(2.0, k);
    const std::vector<Vector> fit =
        ball_points(center.x, radius, config.patch_samples, config.seed + 1000003ULL * (2 * k + 1));
    std::vector<Vector> check =
        ball_points(center.x, radius, config.patch_samples, config.seed + 1000003ULL * (2 * k + 2));
    check.push_back(center.x);
    for (int i = -4; i <= 4; ++i)
      if (i != 0) check.push_back(add_scaled(center.x, radius * i / 4.0, center.frame.normal));

    const AlphaBeta ab = choose_alpha_beta(*sigma, fit, config);
    for (int d = 0; d <= config.doubling_budget; ++d) {
      const double scale = std::pow(2.0, d);
      auto tilde = std::make_shared<WeightedBoostField>(sigma, ab.alpha * scale, ab.beta * scale);
      Report full = check_full_convexity(*tilde, check, "full_convexity");
      Report positive = check_multiplier_positivity(*tilde, spec.field(), check);
      full.extras["patch_radius"] = radius;
      full.extras["C1"] = ab.C1;
      full.extras["C2"] = ab.C2;
      const bool ok = full.pass && full.failures == 0 && positive.pass && positive.failures == 0;
      last = {full, positive};
      if (ok) {
        out.transformed = tilde;
        out.alpha = ab.alpha * scale;
        out.beta = ab.beta * scale;
        out.stage = Stage::fully_convex;
        out.patch_radius = radius;
        out.verification_points = check;
        out.reports.resize(fixed_reports);
        out.reports.push_back(full);
        out.reports.push_back(positive);
        return out;
      }
      // Larger weights only shrink the region where 1 + Bσ stays positive.
      if (!positive.pass || positive.failures > 0) break;
    }
  }
  out.reports.resize(fixed_reports);
  out.reports.insert(out.reports.end(), last.begin(), last.end());
  throw VerificationFailure("full convexification exhausted its shrink budget", out.reports);
}

}  // namespace cvxdef
