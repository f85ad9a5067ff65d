#include "cvxdef/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "cvxdef/errors.hpp"
#include "cvxdef/rng.hpp"

namespace cvxdef {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  Timer() : start_(Clock::now()) {}
  double ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_;
};

Report start_report(std::string name, CheckKind kind, double tolerance) {
  Report r;
  r.check_name = std::move(name);
  r.kind = kind;
  r.tolerance = tolerance;
  r.worst_value = kind == CheckKind::lower_bound ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

std::optional<double> distance_of(const DomainSpec& spec, std::span<const double> x) {
  try {
    return foot_point_unchecked(spec, x).delta;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Records a lower-bound candidate; returns true if it became the worst.
bool offer_min(Report& r, double value, std::span<const double> x, const Vector* direction = nullptr) {
  if (value < r.worst_value || r.worst_point.empty()) {
    r.worst_value = value;
    r.worst_point.assign(x.begin(), x.end());
    if (direction) r.worst_direction = *direction;
    return true;
  }
  return false;
}

// Identity checks track the largest absolute residual.
bool offer_max(Report& r, double residual, std::span<const double> x, const Vector* direction = nullptr) {
  if (std::abs(residual) > std::abs(r.worst_value) || r.worst_point.empty()) {
    r.worst_value = residual;
    r.worst_point.assign(x.begin(), x.end());
    if (direction) r.worst_direction = *direction;
    return true;
  }
  return false;
}

void close(Report& r, const Timer& t) {
  if (r.samples == 0) {
    r.worst_value = 0.0;
    r.pass = false;
  } else {
    finalize(r);
  }
  r.runtime_ms = t.ms();
}

Vector unit(std::span<const double> v) { return scaled(v, 1.0 / norm(v)); }

std::vector<Vector> coordinate_basis(std::size_t n) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::string to_string(CheckKind kind) { return kind == CheckKind::lower_bound ? "lower_bound" : "identity"; }

void finalize(Report& report) {
  if (report.kind == CheckKind::lower_bound) {
    report.pass = report.worst_value >= -report.tolerance;
  } else {
    report.pass = std::abs(report.worst_value) <= report.tolerance;
  }
}

std::vector<Vector> test_directions(const std::vector<Vector>& basis, std::size_t n, std::size_t count,
                                    std::uint64_t seed, std::uint64_t index) {
  std::vector<Vector> out = basis;
  Stream s(seed, index);
  for (std::size_t k = 0; k < count; ++k) out.push_back(s.unit_vector(n));
  return out;
}

Report check_tangential_convexity(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
  Timer t;
  Report r = start_report("tangential_convexity", CheckKind::lower_bound, kPsdTolerance);
  for (const BoundaryPoint& p : samples) {
    try {
      const Jet3 j = spec.field().jet(p.x, 2);
      const TangentFrame frame = tangent_frame(j.grad, p.x);
      const EigenDecomposition eig = eigen_decompose(tangential_block(j.hess, frame));
      Vector dir(spec.dim(), 0.0);
      for (std::size_t k = 0; k < frame.tangent_basis.size(); ++k)
        dir = add_scaled(dir, eig.vectors(k, 0), frame.tangent_basis[k]);
      ++r.samples;
      if (offer_min(r, eig.values.front(), p.x, &dir)) r.worst_point_delta = 0.0;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_full_convexity(const ScalarField& field, const std::vector<Vector>& points, const std::string& name) {
  Timer t;
  Report r = start_report(name, CheckKind::lower_bound, kPsdTolerance);
  for (const Vector& x : points) {
    try {
      const EigenDecomposition eig = eigen_decompose(field.jet(x).hess);
      const Vector dir = eig.vectors.column(0);
      ++r.samples;
      offer_min(r, eig.values.front(), x, &dir);
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_geomseries(const DomainSpec& spec, const std::vector<Vector>& collar) {
  Timer t;
  Report r = start_report("geomseries", CheckKind::identity, kSeriesTolerance);
  for (const Vector& x : collar) {
    try {
      const SymMatrix series = hessian_delta_series(spec, x);
      const SymMatrix fd = hessian_delta_fd(spec, x);
      const double residual = (fd - series).frobenius_norm() / (1.0 + series.frobenius_norm());
      ++r.samples;
      offer_max(r, residual, x);
    } catch (const Error&) {
      ++r.failures;
    }
  }
  if (!r.worst_point.empty()) r.worst_point_delta = distance_of(spec, r.worst_point);
  close(r, t);
  return r;
}

Report check_eikonal(const DomainSpec& spec, const std::vector<Vector>& collar) {
  Timer t;
  Report r = start_report("eikonal", CheckKind::identity, 1e-10);
  double worst_identity = 0.0;
  for (const Vector& x : collar) {
    try {
      const FootPointResult fp = foot_point(spec, x);
      const double residual = norm(fp.normal) - 1.0;
      // b = x − δ∇δ
      worst_identity = std::max(worst_identity, norm(subtract(add_scaled(x, -fp.delta, fp.normal), fp.b)));
      ++r.samples;
      if (offer_max(r, residual, x)) r.worst_point_delta = fp.delta;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  r.extras["foot_point_identity_residual"] = worst_identity;
  close(r, t);
  return r;
}

Report check_normal_annihilation(const DomainSpec& spec, const std::vector<Vector>& collar) {
  Timer t;
  Report r = start_report("normal_annihilation", CheckKind::identity, 1e-8);
  for (const Vector& x : collar) {
    try {
      const FootPointResult fp = foot_point(spec, x);
      const BoundaryPoint bp = make_boundary_point(spec, fp.b);
      const SymMatrix h = shifted_inverse_apply(hessian_delta_boundary(spec, bp), fp.delta);
      const double residual = norm(h.apply(fp.normal));
      ++r.samples;
      if (offer_max(r, residual, x, &fp.normal)) r.worst_point_delta = fp.delta;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_log_convexity_equivalence(const DomainSpec& spec, const std::vector<Vector>& interior) {
  Timer t;
  Report r = start_report("log_convexity_equivalence", CheckKind::identity, 0.0);
  double min_delta_eig = std::numeric_limits<double>::infinity();
  double min_log_eig = std::numeric_limits<double>::infinity();
  double inconsistent = 0.0;
  double both_fail = 0.0;
  double both_pass = 0.0;
  Vector first_bad;
  std::optional<double> first_bad_delta;
  for (const Vector& x : interior) {
    if (!(spec.field().value(x) < 0.0))
      throw DimensionError("log_convexity_equivalence: sample is not strictly inside the domain");
    try {
      const FootPointResult fp = foot_point(spec, x);
      const BoundaryPoint bp = make_boundary_point(spec, fp.b);
      const SymMatrix h_delta = shifted_inverse_apply(hessian_delta_boundary(spec, bp), fp.delta);
      // H_{−log(−δ)} = H_δ/(−δ) + ∇δ∇δᵀ/δ²
      SymMatrix h_log = (-1.0 / fp.delta) * h_delta;
      h_log += (1.0 / (fp.delta * fp.delta)) * SymMatrix::outer(fp.normal);
      const double e_delta = min_eigenvalue(h_delta);
      const double e_log = min_eigenvalue(h_log);
      min_delta_eig = std::min(min_delta_eig, e_delta);
      min_log_eig = std::min(min_log_eig, e_log);
      const bool convex_delta = e_delta >= -kPsdTolerance;
      const bool convex_log = e_log >= -kPsdTolerance;
      ++r.samples;
      if (convex_delta != convex_log) {
        inconsistent += 1.0;
        if (first_bad.empty()) {
          first_bad = x;
          first_bad_delta = fp.delta;
        }
      } else if (convex_delta) {
        both_pass += 1.0;
      } else {
        both_fail += 1.0;
      }
      if (r.worst_point.empty() || e_delta < r.extras["worst_sample_min_eig_delta"]) {
        r.worst_point = x;
        r.worst_point_delta = fp.delta;
        r.extras["worst_sample_min_eig_delta"] = e_delta;
        r.extras["worst_sample_min_eig_log"] = e_log;
      }
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  r.worst_value = inconsistent;
  if (!first_bad.empty()) {
    r.worst_point = first_bad;
    r.worst_point_delta = first_bad_delta;
  }
  if (r.samples > 0) {
    r.extras["min_eig_delta"] = min_delta_eig;
    r.extras["min_eig_log"] = min_log_eig;
  }
  r.extras["both_convex"] = both_pass;
  r.extras["both_nonconvex"] = both_fail;
  close(r, t);
  return r;
}

namespace {

struct ThresholdTerms {
  double sigma;
  Vector grad;
  SymMatrix hess;
  SymMatrix log_hess;
};

ThresholdTerms threshold_terms(const ScalarField& sigma, std::span<const double> x) {
  const Jet3 j = sigma.jet(x);
  if (!(j.value < 0.0)) throw DimensionError("threshold_equivalence: sample is not inside the domain");
  require_gradient(j.grad, "threshold_equivalence");
  ThresholdTerms t{j.value, j.grad, j.hess, (-1.0 / j.value) * j.hess};
  t.log_hess += (1.0 / (j.value * j.value)) * SymMatrix::outer(j.grad);
  return t;
}

// Smallest C with H_log ≥ −C|σ|I.
double log_constant(const ThresholdTerms& t) {
  return std::max(0.0, -min_eigenvalue(t.log_hess) / std::abs(t.sigma));
}

// Smallest C̃ with H_σ ≥ −C̃(σ²I + uuᵀ), u = ∇σ/‖∇σ‖: a generalized eigenvalue,
// reduced through M^{-1/2} = (I − uuᵀ)/|σ| + uuᵀ/√(σ² + 1).
double sigma_constant(const ThresholdTerms& t) {
  const std::size_t n = t.grad.size();
  const Vector u = unit(t.grad);
  const double a = 1.0 / std::abs(t.sigma);
  const double b = 1.0 / std::sqrt(t.sigma * t.sigma + 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? a : 0.0) + (b - a) * u[i] * u[j];
  const Matrix reduced = m * t.hess.dense() * m;
  return std::max(0.0, -min_eigenvalue(SymMatrix::from_dense(reduced)));
}

}  // namespace

Report check_threshold_equivalence(const DomainSpec& spec, const ScalarField& sigma, const std::vector<Vector>& train,
                                   const std::vector<Vector>& holdout, std::uint64_t seed) {
  Timer t;
  Report r = start_report("threshold_equivalence", CheckKind::lower_bound, kPsdTolerance);
  const std::size_t n = spec.dim();
  double c_log = 0.0;
  double c_sigma = 0.0;
  double train_used = 0.0;
  for (const Vector& x : train) {
    try {
      const ThresholdTerms terms = threshold_terms(sigma, x);
      c_log = std::max(c_log, log_constant(terms));
      c_sigma = std::max(c_sigma, sigma_constant(terms));
      train_used += 1.0;
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  r.extras["C"] = c_log;
  r.extras["C_tilde"] = c_sigma;
  r.extras["train_samples"] = train_used;

  const double cl = 1.01 * c_log;
  const double cs = 1.01 * c_sigma;
  for (std::size_t k = 0; k < holdout.size(); ++k) {
    const Vector& x = holdout[k];
    try {
      const ThresholdTerms terms = threshold_terms(sigma, x);
      const double g2 = dot(terms.grad, terms.grad);
      for (const Vector& xi : test_directions(coordinate_basis(n), n, 16, seed, k)) {
        const double xx = dot(xi, xi);
        const double gx = dot(terms.grad, xi);
        const double slack_log = hessian_form(terms.log_hess, xi, xi) + cl * std::abs(terms.sigma) * xx;
        const double slack_sigma =
            hessian_form(terms.hess, xi, xi) + cs * (terms.sigma * terms.sigma * xx + gx * gx / g2);
        offer_min(r, std::min(slack_log, slack_sigma), x, &xi);
      }
      ++r.samples;
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  if (!r.worst_point.empty()) r.worst_point_delta = distance_of(spec, r.worst_point);
  close(r, t);
  if (!(std::isfinite(c_log) && std::isfinite(c_sigma)) || train_used == 0.0) r.pass = false;
  return r;
}

Report check_half_bound(const DomainSpec& spec, const std::vector<Vector>& exterior, std::uint64_t seed,
                        std::size_t directions) {
  Timer t;
  Report r = start_report("half_bound", CheckKind::lower_bound, kPsdTolerance);
  const std::size_t n = spec.dim();
  for (std::size_t k = 0; k < exterior.size(); ++k) {
    const Vector& x = exterior[k];
    if (!(spec.field().value(x) > 0.0)) throw DimensionError("half_bound: sample is not outside the domain");
    try {
      const FootPointResult fp = foot_point(spec, x);
      const BoundaryPoint bp = make_boundary_point(spec, fp.b);
      const SymMatrix h_b = hessian_delta_boundary(spec, bp);
      const SymMatrix h_x = shifted_inverse_apply(h_b, fp.delta);
      for (const Vector& xi : test_directions(bp.frame.tangent_basis, n, directions, seed, k)) {
        const double value = hessian_form(h_x, xi, xi) - 0.5 * hessian_form(h_b, xi, xi);
        if (offer_min(r, value, x, &xi)) r.worst_point_delta = fp.delta;
      }
      ++r.samples;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_unit_gradient(const ScalarField& f, const std::vector<BoundaryPoint>& samples, const std::string& name) {
  Timer t;
  Report r = start_report(name, CheckKind::identity, 1e-10);
  for (const BoundaryPoint& p : samples) {
    try {
      const Jet3 j = f.jet(p.x);
      ++r.samples;
      if (offer_max(r, norm(j.grad) - 1.0, p.x)) r.worst_point_delta = 0.0;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_mixed_terms(const ScalarField& f, const std::vector<BoundaryPoint>& samples, const std::string& name) {
  Timer t;
  Report r = start_report(name, CheckKind::identity, 1e-8);
  for (const BoundaryPoint& p : samples) {
    try {
      const Jet3 j = f.jet(p.x);
      for (const Vector& tau : p.frame.tangent_basis)
        if (offer_max(r, hessian_form(j.hess, tau, j.grad), p.x, &tau)) r.worst_point_delta = 0.0;
      ++r.samples;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_r0_hessian_identity(const DomainSpec& spec, const ScalarField& r0,
                                 const std::vector<BoundaryPoint>& samples, std::uint64_t seed) {
  Timer t;
  Report r = start_report("r0_hessian_identity", CheckKind::identity, 1e-8);
  const std::size_t n = spec.dim();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const BoundaryPoint& p = samples[k];
    try {
      const Jet3 jr = spec.field().jet(p.x, 2);
      const Jet3 j0 = r0.jet(p.x);
      const double g = require_gradient(jr.grad, "r0_hessian_identity");
      std::vector<Vector> basis = p.frame.tangent_basis;
      basis.push_back(p.frame.normal);
      for (const Vector& xi : test_directions(basis, n, 16, seed, k)) {
        const auto [xt, xn] = tangent_split(jr.grad, xi);
        const double rhs = (hessian_form(jr.hess, xt, xt) - hessian_form(jr.hess, xn, xn)) / g;
        if (offer_max(r, hessian_form(j0.hess, xi, xi) - rhs, p.x, &xi)) r.worst_point_delta = 0.0;
      }
      ++r.samples;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_r1_lower_bound(const DomainSpec& spec, const ScalarField& r1, double K,
                            const std::vector<BoundaryPoint>& samples, std::uint64_t seed) {
  Timer t;
  Report r = start_report("r1_lower_bound", CheckKind::lower_bound, kPsdTolerance);
  r.extras["K"] = K;
  const std::size_t n = spec.dim();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const BoundaryPoint& p = samples[k];
    try {
      const Jet3 jr = spec.field().jet(p.x, 2);
      const Jet3 j1 = r1.jet(p.x);
      const double g = require_gradient(jr.grad, "r1_lower_bound");
      std::vector<Vector> basis = p.frame.tangent_basis;
      basis.push_back(p.frame.normal);
      for (const Vector& xi : test_directions(basis, n, 16, seed, k)) {
        const auto [xt, xn] = tangent_split(jr.grad, xi);
        const double c = dot(p.frame.normal, xi);  // ∇r₀ = ν on the boundary
        const double bound = hessian_form(jr.hess, xt, xt) / g + K * c * c;
        if (offer_min(r, hessian_form(j1.hess, xi, xi) - bound, p.x, &xi)) r.worst_point_delta = 0.0;
      }
      ++r.samples;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_sigma_lemma(const ScalarField& sigma, const std::vector<BoundaryPoint>& samples) {
  Timer t;
  Report r = start_report("sigma_lemma", CheckKind::identity, 1e-6);
  for (const BoundaryPoint& p : samples) {
    try {
      const Jet3 j = sigma.jet(p.x);
      if (j.order < 3) throw DimensionError("sigma_lemma: field does not provide third derivatives");
      for (const Vector& tau : p.frame.tangent_basis) {
        const double lhs = contract3(j.third, tau, tau, j.grad);
        const Vector h_tau = j.hess.apply(tau);
        const double rhs = hessian_form(j.hess, tau, tau) * hessian_form(j.hess, j.grad, j.grad) - dot(h_tau, h_tau);
        if (offer_max(r, lhs - rhs, p.x, &tau)) r.worst_point_delta = 0.0;
      }
      ++r.samples;
    } catch (const DimensionError&) {
      throw;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

Report check_multiplier_positivity(const ScalarField& transformed, const ScalarField& r_field,
                                   const std::vector<Vector>& points, const std::string& name) {
  Timer t;
  Report r = start_report(name, CheckKind::lower_bound, 0.0);
  for (const Vector& x : points) {
    try {
      const double rv = r_field.value(x);
      if (std::abs(rv) <= 1e-12) continue;
      ++r.samples;
      offer_min(r, transformed.value(x) / rv, x);
    } catch (const Error&) {
      ++r.failures;
    }
  }
  close(r, t);
  return r;
}

}  // namespace cvxdef
