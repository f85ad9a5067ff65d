#include <cmath>
#include <vector>

#include "cvxdef/convexify.hpp"
#include "cvxdef/corpus.hpp"
#include "cvxdef/rng.hpp"
#include "cvxdef/verify.hpp"
#include "doctest.h"

using namespace cvxdef;

namespace {

DomainSpec circle_with_collar(double collar) {
  return DomainSpec("circle", 2, "x1^2 + x2^2 - 1", Box{{-2, -2}, {2, 2}}, {1, 0}, collar);
}

std::vector<Vector> xs(const std::vector<BoundaryPoint>& pts) {
  std::vector<Vector> out;
  for (const BoundaryPoint& p : pts) out.push_back(p.x);
  return out;
}

std::vector<BoundaryPoint> boundary_near_origin(const DomainSpec& spec, double a, std::size_t count) {
  return sample_boundary(spec, count, 7, Box{{-a, -a}, {a, a}});
}

}  // namespace

TEST_CASE("tangential convexity on the worked examples and a hyperbola") {
  const DomainSpec s = builtin_spec("paper_example_s");
  const Report rs = check_tangential_convexity(s, boundary_near_origin(s, 0.2, 64));
  CHECK(rs.pass);
  CHECK(rs.samples == 64);

  const DomainSpec s2 = builtin_spec("paper_example_s2");
  const Report r2 = check_tangential_convexity(s2, boundary_near_origin(s2, 0.3, 64));
  CHECK(r2.pass);
  CHECK(r2.worst_value >= -1e-12);

  const DomainSpec hyp = builtin_spec("hyperbola");
  const Report rh = check_tangential_convexity(hyp, sample_boundary(hyp, 32, 1));
  CHECK(!rh.pass);
  CHECK(rh.worst_value < -1.0);
  CHECK(*rh.worst_point_delta == 0.0);
}

TEST_CASE("full convexity") {
  const DomainSpec s = builtin_spec("paper_example_s");
  Stream st(2, 0);
  std::vector<Vector> pts;
  for (int k = 0; k < 50; ++k) pts.push_back({st.uniform(-0.3, 0.3), st.uniform(-0.3, 0.3)});
  const Report raw = check_full_convexity(s.field(), pts);
  CHECK(!raw.pass);
  CHECK(raw.worst_value == doctest::Approx(-2.0).epsilon(1e-12));

  const DomainSpec circle = builtin_spec("circle");
  const Report ok = check_full_convexity(circle.field(), pts);
  CHECK(ok.pass);
  CHECK(ok.worst_value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ok.check_name == "full_convexity");
  CHECK(ok.tolerance == kPsdTolerance);
}

TEST_CASE("geomseries on an annulus and through the centre") {
  const DomainSpec circle = circle_with_collar(0.6);
  std::vector<Vector> annulus;
  Stream st(3, 0);
  for (int k = 0; k < 60; ++k) annulus.push_back(scaled(st.unit_vector(2), st.uniform(0.5, 1.5)));
  const Report r = check_geomseries(circle, annulus);
  CHECK(r.pass);
  CHECK(r.failures == 0);

  const DomainSpec wide = circle_with_collar(1.5);
  std::vector<Vector> through = annulus;
  through.push_back({0.0, 0.0});
  const Report rw = check_geomseries(wide, through);
  CHECK(rw.failures >= 1);
  CHECK(rw.samples == annulus.size());
  CHECK(rw.pass);

  const DomainSpec ellipse = builtin_spec("ellipse");
  const Report re = check_geomseries(ellipse, collar_points(sample_boundary(ellipse, 40, 4), -0.3, 0.3, 5));
  CHECK(re.pass);
  CHECK(re.kind == CheckKind::identity);
}

TEST_CASE("eikonal and normal annihilation") {
  for (const char* name : {"circle", "ellipse", "superellipse4", "halfspace"}) {
    CAPTURE(name);
    const DomainSpec spec = builtin_spec(name);
    const double c = 0.75 * spec.collar_radius();
    const auto collar = collar_points(sample_boundary(spec, 40, 6), -c, c, 7);
    const Report e = check_eikonal(spec, collar);
    CHECK(e.pass);
    CHECK(e.extras.at("foot_point_identity_residual") <= 1e-10);
    const Report a = check_normal_annihilation(spec, collar);
    CHECK(a.pass);
  }
}

TEST_CASE("log-convexity equivalence") {
  const DomainSpec circle = builtin_spec("circle");
  const Report one = check_log_convexity_equivalence(circle_with_collar(0.6), {{0.5, 0.0}});
  CHECK(one.pass);
  CHECK(one.extras.at("min_eig_delta") == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(one.extras.at("min_eig_log") == doctest::Approx(4.0).epsilon(1e-12));

  const DomainSpec half = builtin_spec("halfspace");
  std::vector<Vector> below;
  for (int k = 1; k <= 10; ++k) below.push_back({0.05 * k - 0.3, -0.05 * k});
  const Report h = check_log_convexity_equivalence(half, below);
  CHECK(h.pass);
  CHECK(h.extras.at("both_convex") == 10.0);

  const DomainSpec peanut = builtin_spec("peanut");
  const BoundaryPoint waist = make_boundary_point(peanut, peanut.seed_point());
  std::vector<Vector> inside;
  for (int k = 1; k <= 8; ++k) inside.push_back(add_scaled(waist.x, -0.02 * k, waist.frame.normal));
  const Report p = check_log_convexity_equivalence(peanut, inside);
  CHECK(p.pass);
  CHECK(p.extras.at("both_nonconvex") == 8.0);

  CHECK_THROWS_AS(check_log_convexity_equivalence(circle, {{1.2, 0.0}}), DimensionError);
}

TEST_CASE("threshold equivalence") {
  const DomainSpec circle = builtin_spec("circle");
  const NormalizedField r0(circle.field_ptr());
  const double c = circle.collar_radius();
  const auto train = collar_points(sample_boundary(circle, 16, 8), -0.8 * c, -0.02 * c, 9);
  const auto holdout = collar_points(sample_boundary(circle, 32, 10), -0.75 * c, -0.05 * c, 11);
  const Report rc = check_threshold_equivalence(circle, r0, train, holdout, 12);
  CHECK(rc.pass);
  CHECK(std::isfinite(rc.extras.at("C")));
  CHECK(std::isfinite(rc.extras.at("C_tilde")));

  const DomainSpec half = builtin_spec("halfspace");
  const NormalizedField h0(half.field_ptr());
  const auto htrain = collar_points(sample_boundary(half, 16, 8), -0.5, -0.01, 9);
  const Report rh = check_threshold_equivalence(half, h0, htrain, htrain, 12);
  CHECK(rh.pass);
  CHECK(rh.extras.at("C") == 0.0);
  CHECK(rh.extras.at("C_tilde") == 0.0);

  const DomainSpec s2 = builtin_spec("paper_example_s2");
  const NormalizedField s0(s2.field_ptr());
  const double c2 = s2.collar_radius();
  const Report rs = check_threshold_equivalence(
      s2, s0, collar_points(sample_boundary(s2, 64, 8), -0.8 * c2, -0.02 * c2, 9),
      collar_points(sample_boundary(s2, 32, 10), -0.75 * c2, -0.05 * c2, 11), 12);
  CHECK(rs.pass);
  CHECK(std::isfinite(rs.extras.at("C")));
}

TEST_CASE("half bound") {
  for (const char* name : {"circle", "ellipse"}) {
    const DomainSpec spec = builtin_spec(name);
    const double c = spec.collar_radius();
    const auto ext = collar_points(sample_boundary(spec, 40, 13), 0.05 * c, 0.75 * c, 14);
    const Report r = check_half_bound(spec, ext, 15);
    CHECK(r.pass);
    CHECK(r.samples == ext.size());
  }
  // Outside the unit circle the tangential value is 1/(1+δ) against ½.
  const Report one = check_half_bound(circle_with_collar(1.5), {{2.0, 0.0}}, 16);
  CHECK(one.worst_value >= 0.0);
  CHECK(one.worst_value <= 1e-15);

  const DomainSpec half = builtin_spec("halfspace");
  const Report h = check_half_bound(half, {{0.1, 0.2}, {-0.3, 0.5}}, 17);
  CHECK(h.pass);
  CHECK(h.worst_value == 0.0);
  CHECK_THROWS_AS(check_half_bound(half, {{0.0, -0.2}}, 17), DimensionError);
}

TEST_CASE("boundary identities of r0 and r1 and the sigma lemma") {
  for (const char* name : {"circle", "paper_example_s", "ellipse"}) {
    CAPTURE(name);
    const DomainSpec spec = builtin_spec(name);
    const auto samples = sample_boundary(spec, 50, 18);
    const ConvexificationResult r0 = normalize_r0(spec, samples);
    CHECK(check_unit_gradient(*r0.transformed, samples).pass);
    CHECK(check_mixed_terms(*r0.transformed, samples).pass);
    CHECK(check_r0_hessian_identity(spec, *r0.transformed, samples, 19).pass);
    const double K = choose_K(spec, samples, 1.25);
    const SquareBoostField r1(r0.transformed, K);
    CHECK(check_r1_lower_bound(spec, r1, K, samples, 20).pass);
    const Report lemma = check_sigma_lemma(r1, samples);
    CHECK(lemma.pass);
    CHECK(lemma.samples == 50);
  }
  // Raw r has ‖∇r‖ = 2 on the circle; the unit-gradient check must notice.
  const DomainSpec circle = builtin_spec("circle");
  const Report raw = check_unit_gradient(circle.field(), sample_boundary(circle, 8, 21));
  CHECK(!raw.pass);
  CHECK(raw.worst_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multiplier positivity") {
  const DomainSpec circle = builtin_spec("circle");
  const SquareBoostField boosted(circle.field_ptr(), 0.5);
  const Report ok = check_multiplier_positivity(boosted, circle.field(), {{0.5, 0.0}, {1.2, 0.3}, {1.0, 0.0}});
  CHECK(ok.pass);
  CHECK(ok.samples == 2);
  // 1 + K·r turns negative once r < −1/K: at the origin r = −1.
  const SquareBoostField strong(circle.field_ptr(), 2.0);
  CHECK(!check_multiplier_positivity(strong, circle.field(), {{0.0, 0.0}}).pass);
}

TEST_CASE("failing reports are self-certifying") {
  const DomainSpec s = builtin_spec("paper_example_s");
  Stream st(22, 0);
  std::vector<Vector> pts;
  for (int k = 0; k < 30; ++k) pts.push_back({st.uniform(-0.3, 0.3), st.uniform(-0.3, 0.3)});
  const Report full = check_full_convexity(s.field(), pts);
  REQUIRE(!full.pass);
  const SymMatrix h = s.field().jet(full.worst_point).hess;
  CHECK(std::abs(min_eigenvalue(h) - full.worst_value) <= 1e-10);
  CHECK(std::abs(hessian_form(h, *full.worst_direction, *full.worst_direction) - full.worst_value) <= 1e-10);

  const DomainSpec hyp = builtin_spec("hyperbola");
  const Report tan = check_tangential_convexity(hyp, sample_boundary(hyp, 32, 23));
  REQUIRE(!tan.pass);
  const Jet3 j = hyp.field().jet(tan.worst_point);
  const Vector& d = *tan.worst_direction;
  CHECK(std::abs(dot(d, j.grad)) <= 1e-12);
  CHECK(std::abs(hessian_form(j.hess, d, d) - tan.worst_value) <= 1e-10);

  const DomainSpec circle = builtin_spec("circle");
  const SquareBoostField boosted(circle.field_ptr(), 0.0);
  const auto samples = sample_boundary(circle, 8, 24);
  const Report bound = check_r1_lower_bound(circle, boosted, 10.0, samples, 25);
  REQUIRE(!bound.pass);
  const Jet3 jr = circle.field().jet(bound.worst_point);
  const Vector& xi = *bound.worst_direction;
  const auto [xt, xn] = tangent_split(jr.grad, xi);
  const double c = dot(jr.grad, xi) / norm(jr.grad);
  const double value = hessian_form(jr.hess, xi, xi) - hessian_form(jr.hess, xt, xt) / norm(jr.grad) - 10.0 * c * c;
  CHECK(std::abs(value - bound.worst_value) <= 1e-10);
}

TEST_CASE("full PSD on boundary samples implies tangential PSD") {
  Stream st(26, 0);
  int both = 0;
  for (int k = 0; k < 60; ++k) {
    const double a = st.uniform(-0.5, 2), b = st.uniform(0.2, 2), c = st.uniform(-1, 1), e = st.uniform(-0.3, 0.3);
    const std::string text = std::to_string(a) + "*x1^2 + " + std::to_string(b) + "*x2^2 + " + std::to_string(c) +
                             "*x1*x2 + " + std::to_string(e) + "*x1^3 - 1";
    const DomainSpec spec("family", 2, text, Box{{-3, -3}, {3, 3}}, {0, 1});
    std::vector<BoundaryPoint> samples;
    try {
      samples = sample_boundary(spec, 16, static_cast<std::uint64_t>(k));
    } catch (const Error&) {
      continue;
    }
    const Report full = check_full_convexity(spec.field(), xs(samples));
    const Report tan = check_tangential_convexity(spec, samples);
    CAPTURE(text);
    if (full.pass) {
      CHECK(tan.pass);
      ++both;
    }
    CHECK(tan.worst_value >= full.worst_value - 1e-12);
  }
  CHECK(both > 10);
}

TEST_CASE("reports are deterministic") {
  const DomainSpec ellipse = builtin_spec("ellipse");
  const double c = ellipse.collar_radius();
  auto run = [&] {
    return check_half_bound(ellipse, collar_points(sample_boundary(ellipse, 30, 27), 0.05 * c, 0.75 * c, 28), 29);
  };
  const Report a = run();
  const Report b = run();
  CHECK(a.worst_value == b.worst_value);
  CHECK(a.worst_point == b.worst_point);
  CHECK(*a.worst_direction == *b.worst_direction);
  CHECK(a.samples == b.samples);
}

TEST_CASE("finalize and empty reports") {
  Report r;
  r.kind = CheckKind::identity;
  r.tolerance = 1e-8;
  r.worst_value = -5e-9;
  finalize(r);
  CHECK(r.pass);
  r.kind = CheckKind::lower_bound;
  r.worst_value = -2e-8;
  finalize(r);
  CHECK(!r.pass);
  const DomainSpec circle = builtin_spec("circle");
  const Report empty = check_full_convexity(circle.field(), {});
  CHECK(!empty.pass);
  CHECK(empty.samples == 0);
}
