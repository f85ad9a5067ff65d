#include "cvxdef/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvxdef/convexify.hpp"
#include "cvxdef/corpus.hpp"
#include "cvxdef/rng.hpp"
#include "json.hpp"

namespace cvxdef {

namespace {

using nlohmann::json;

class InputError : public Error {
 public:
  using Error::Error;
};

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Vector parse_reals(const std::string& text, const char* what) {
  Vector out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    item.erase(0, item.find_first_not_of(" \t\r"));
    item.erase(item.find_last_not_of(" \t\r") + 1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v))
      throw InputError(std::string(what) + ": cannot read '" + item + "' as a number");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

json optional_vector(const std::optional<Vector>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const Report& r, bool timings) {
  json j;
  j["check_name"] = r.check_name;
  j["kind"] = to_string(r.kind);
  j["samples"] = r.samples;
  j["worst_value"] = r.worst_value;
  j["worst_point"] = r.worst_point;
  j["worst_direction"] = optional_vector(r.worst_direction);
  j["worst_point_delta"] = r.worst_point_delta ? json(*r.worst_point_delta) : json(nullptr);
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["runtime_ms"] = timings ? r.runtime_ms : 0.0;
  j["failures"] = r.failures;
  j["extras"] = json(r.extras);
  j["verification"] = "sampled";
  return j;
}

json report_file(const DomainSpec& spec, const std::vector<Report>& reports, bool timings) {
  json doc;
  doc["artifact_version"] = kArtifactVersion;
  doc["spec"] = json::parse(spec_to_json(spec, -1));
  doc["checks"] = json::array();
  for (const Report& r : reports) doc["checks"].push_back(report_json(r, timings));
  return doc;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

bool all_pass(const std::vector<Report>& reports) {
  for (const Report& r : reports)
    if (!r.pass) return false;
  return !reports.empty();
}

DomainSpec load_checked(const std::string& source) {
  std::optional<DomainSpec> loaded;
  try {
    loaded.emplace(load_spec(source));
  } catch (const ParseError& e) {
    throw InputError(std::string("spec expression: ") + e.what());
  } catch (const DimensionError& e) {
    throw InputError(std::string("spec: ") + e.what());
  }
  const DomainSpec& spec = *loaded;
  try {
    sample_boundary(spec, 1, spec.seed());
  } catch (const BoundaryNotFoundError&) {
    throw InputError("spec '" + spec.name() + "': no boundary point found inside the region");
  }
  return spec;
}

std::vector<Vector> region_points(const Box& box, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> out;
  for (std::size_t k = 0; k < count; ++k) {
    Stream s(seed, k);
    Vector x(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) x[i] = s.uniform(box.lo[i], box.hi[i]);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Report> boundary_suite(const DomainSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::vector<BoundaryPoint> base = sample_boundary(spec, n, seed);
  std::vector<Report> out{check_tangential_convexity(spec, base)};
  auto r0 = std::make_shared<NormalizedField>(spec.field_ptr());
  out.push_back(check_unit_gradient(*r0, base));
  out.push_back(check_mixed_terms(*r0, base));
  out.push_back(check_r0_hessian_identity(spec, *r0, base, seed));
  const double K = choose_K(spec, base, PipelineConfig{}.safety);
  const SquareBoostField r1(r0, K);
  out.push_back(check_r1_lower_bound(spec, r1, K, base, seed));
  out.push_back(check_sigma_lemma(r1, base));
  return out;
}

std::vector<Report> full_suite(const DomainSpec& spec, std::size_t n, std::uint64_t seed) {
  return {check_full_convexity(spec.field(), region_points(spec.region(), n, seed), "full_convexity")};
}

std::vector<Report> delta_suite(const DomainSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::vector<BoundaryPoint> base = sample_boundary(spec, n, seed);
  const double c = spec.collar_radius();
  const std::vector<Vector> collar = collar_points(base, -0.75 * c, 0.75 * c, seed + 1);
  return {check_geomseries(spec, collar), check_eikonal(spec, collar), check_normal_annihilation(spec, collar),
          check_half_bound(spec, collar_points(base, 0.05 * c, 0.75 * c, seed + 2), seed)};
}

std::vector<Report> log_suite(const DomainSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::vector<BoundaryPoint> base = sample_boundary(spec, n, seed);
  const double c = spec.collar_radius();
  std::vector<Report> out{check_log_convexity_equivalence(spec, collar_points(base, -0.75 * c, -0.05 * c, seed + 3))};
  const NormalizedField r0(spec.field_ptr());
  const std::vector<BoundaryPoint> dense = sample_boundary(spec, 4 * n, seed + 4);
  out.push_back(check_threshold_equivalence(spec, r0, collar_points(dense, -0.8 * c, -0.02 * c, seed + 5),
                                            collar_points(base, -0.75 * c, -0.05 * c, seed + 6), seed));
  return out;
}

int cmd_check(const std::string& source, const std::string& suite, std::size_t samples,
              std::optional<std::uint64_t> seed_opt, const std::string& out_path, bool timings, std::ostream& out) {
  const DomainSpec spec = load_checked(source);
  const std::uint64_t seed = seed_opt.value_or(spec.seed());
  std::vector<Report> reports;
  auto append = [&](std::vector<Report> more) { reports.insert(reports.end(), more.begin(), more.end()); };
  if (suite == "boundary" || suite == "all") append(boundary_suite(spec, samples, seed));
  if (suite == "full" || suite == "all") append(full_suite(spec, samples, seed));
  if (suite == "delta" || suite == "all") append(delta_suite(spec, samples, seed));
  if (suite == "log" || suite == "all") append(log_suite(spec, samples, seed));
  write_text(out_path, report_file(spec, reports, timings).dump(2) + "\n", out);
  return all_pass(reports) ? 0 : 1;
}

double min_eig_or_nan(const ScalarField* f, std::span<const double> x) {
  if (!f) return std::nan("");
  try {
    return min_eigenvalue(f->jet(x).hess);
  } catch (const Error&) {
    return std::nan("");
  }
}

int cmd_convexify(const std::string& source, const std::string& center_text, std::optional<std::uint64_t> seed_opt,
                  const std::string& out_path, const std::string& csv_path, bool timings, std::ostream& out,
                  std::ostream& err) {
  const DomainSpec spec = load_checked(source);
  const Vector center = center_text.empty() ? spec.seed_point() : parse_reals(center_text, "--center");
  if (center.size() != spec.dim()) throw InputError("--center needs " + std::to_string(spec.dim()) + " coordinates");
  BoundaryPoint p;
  try {
    p = project_to_boundary(spec, center);
  } catch (const Error& e) {
    throw InputError(std::string("--center does not project to the boundary: ") + e.what());
  }
  PipelineConfig config;
  config.seed = seed_opt.value_or(spec.seed());

  try {
    const ConvexificationResult res = full_convexify(spec, p, config);
    json doc = report_file(spec, res.reports, timings);
    json constants = json::object();
    if (res.K) constants["K"] = *res.K;
    if (res.alpha) constants["alpha"] = *res.alpha;
    if (res.beta) constants["beta"] = *res.beta;
    doc["constants"] = constants;
    doc["patch_center"] = *res.patch_center;
    doc["patch_radius"] = *res.patch_radius;
    doc["stage"] = to_string(res.stage);
    doc["fast_path"] = res.fast_path;
    write_text(out_path, doc.dump(2) + "\n", out);
    if (!csv_path.empty()) {
      std::ostringstream csv;
      for (std::size_t i = 0; i < spec.dim(); ++i) csv << 'x' << i + 1 << ',';
      csv << "min_eigenvalue_before,min_eigenvalue_after\n";
      for (const Vector& x : res.verification_points) {
        for (double v : x) csv << number(v) << ',';
        csv << number(min_eig_or_nan(res.sigma.get(), x)) << ',' << number(min_eig_or_nan(res.transformed.get(), x))
            << '\n';
      }
      write_text(csv_path, csv.str(), out);
    }
    return 0;
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << '\n';
    json doc = report_file(spec, e.reports(), timings);
    doc["error"] = e.what();
    write_text(out_path, doc.dump(2) + "\n", out);
    return 1;
  }
}

std::vector<Vector> read_points(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open points file '" + path + "'");
  std::vector<Vector> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Vector v;
    try {
      v = parse_reals(line, "--points");
    } catch (const InputError&) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw;
    }
    first = false;
    if (v.size() != dim) throw InputError("--points: row has " + std::to_string(v.size()) + " columns, expected " +
                                          std::to_string(dim));
    out.push_back(std::move(v));
  }
  if (out.empty()) throw InputError("--points: no points in '" + path + "'");
  return out;
}

std::vector<Vector> grid_points(const std::string& text, const Box& box) {
  if (text.empty()) throw InputError("--grid: empty grid");
  const Vector counts = parse_reals(text, "--grid");
  if (counts.size() != box.dim())
    throw InputError("--grid needs " + std::to_string(box.dim()) + " counts");
  std::vector<std::size_t> n;
  for (double c : counts) {
    if (c < 1 || c != std::floor(c) || c > 1e6) throw InputError("--grid: counts must be positive integers");
    n.push_back(static_cast<std::size_t>(c));
  }
  std::vector<Vector> out;
  std::vector<std::size_t> idx(n.size(), 0);
  while (true) {
    Vector x(n.size());
    for (std::size_t i = 0; i < n.size(); ++i)
      x[i] = n[i] == 1 ? 0.5 * (box.lo[i] + box.hi[i])
                       : box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(idx[i]) / static_cast<double>(n[i] - 1);
    out.push_back(std::move(x));
    std::size_t i = 0;
    while (i < n.size() && ++idx[i] == n[i]) idx[i++] = 0;
    if (i == n.size()) break;
  }
  return out;
}

int cmd_distance(const std::string& source, const std::string& points_path, const std::string& grid,
                 bool grid_given, const std::string& out_path, std::ostream& out) {
  const DomainSpec spec = load_checked(source);
  const std::size_t n = spec.dim();
  const std::vector<Vector> points = grid_given ? grid_points(grid, spec.region()) : read_points(points_path, n);

  std::ostringstream csv;
  for (std::size_t i = 0; i < n; ++i) csv << 'x' << i + 1 << ',';
  csv << "delta,";
  for (std::size_t i = 0; i < n; ++i) csv << "grad_delta" << i + 1 << ',';
  csv << "min_eig_series,geomseries_residual,status\n";
  for (const Vector& x : points) {
    for (double v : x) csv << number(v) << ',';
    try {
      const FootPointResult fp = foot_point(spec, x);
      const Vector g = grad_delta(spec, x);
      const SymMatrix series = hessian_delta_series(spec, x);
      const SymMatrix fd = hessian_delta_fd(spec, x);
      const double residual = (fd - series).frobenius_norm() / (1.0 + series.frobenius_norm());
      csv << number(fp.delta) << ',';
      for (double v : g) csv << number(v) << ',';
      csv << number(min_eigenvalue(series)) << ',' << number(residual) << ",ok\n";
    } catch (const Error&) {
      csv << ',';
      for (std::size_t i = 0; i < n; ++i) csv << ',';
      csv << ",,unreachable\n";
    }
  }
  write_text(out_path, csv.str(), out);
  return 0;
}

int cmd_corpus(const std::string& name, std::ostream& out) {
  if (name.empty()) {
    for (const std::string& s : builtin_names()) out << s << '\n';
    return 0;
  }
  out << spec_to_json(builtin_spec(name)) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convex defining functions for implicit domains: construction and sampled verification", "cvxdef"};
  app.require_subcommand(1);

  std::string spec_src, out_path, suite = "all", center, csv_path, points_path, grid, corpus_name;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  bool timings = false;

  auto* check = app.add_subcommand("check", "run a verification suite on a spec");
  check->add_option("spec", spec_src, "spec file or builtin:NAME")->required();
  check->add_option("--suite", suite, "boundary|full|delta|log|all")
      ->check(CLI::IsMember({"boundary", "full", "delta", "log", "all"}));
  check->add_option("--samples", samples, "sample count")->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  auto* check_seed = check->add_option("--seed", seed, "RNG seed (defaults to the spec's)");
  check->add_option("--out", out_path, "report path (stdout when omitted)");
  check->add_flag("--timings", timings, "keep measured runtimes in the report");

  auto* conv = app.add_subcommand("convexify", "build a convex defining function near a boundary point");
  conv->add_option("spec", spec_src, "spec file or builtin:NAME")->required();
  conv->add_option("--center", center, "comma-separated point, projected to the boundary (default: seed_point)");
  auto* conv_seed = conv->add_option("--seed", seed, "RNG seed (defaults to the spec's)");
  conv->add_option("--out", out_path, "report path (stdout when omitted)");
  conv->add_option("--emit-csv", csv_path, "CSV of min eigenvalues before/after on the verification points");
  conv->add_flag("--timings", timings, "keep measured runtimes in the report");

  auto* dist = app.add_subcommand("distance", "signed distance and its Hessian at points");
  dist->add_option("spec", spec_src, "spec file or builtin:NAME")->required();
  auto* pts = dist->add_option("--points", points_path, "CSV file of points");
  auto* grd = dist->add_option("--grid", grid, "grid counts per axis over the region, e.g. 21,21");
  pts->excludes(grd);
  dist->add_option("--out", out_path, "CSV path (stdout when omitted)");

  auto* corpus = app.add_subcommand("corpus", "list builtin specs or print one as JSON");
  corpus->add_option("name", corpus_name, "builtin name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (check->parsed())
      return cmd_check(spec_src, suite, samples, *check_seed ? std::optional(seed) : std::nullopt, out_path, timings,
                       out);
    if (conv->parsed())
      return cmd_convexify(spec_src, center, *conv_seed ? std::optional(seed) : std::nullopt, out_path, csv_path,
                           timings, out, err);
    if (dist->parsed()) {
      if (!*pts && !*grd) throw InputError("distance needs --points or --grid");
      return cmd_distance(spec_src, points_path, grid, static_cast<bool>(*grd), out_path, out);
    }
    return cmd_corpus(corpus_name, out);
  } catch (const SpecFileError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cvxdef
