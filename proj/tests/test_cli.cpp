#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cvxdef/cli.hpp"
#include "cvxdef/corpus.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cvxdef;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"cvxdef"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cvxdef_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

int tool_exit(const std::string& args) {
  const int status = std::system((std::string(CVXDEF_TOOL) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("check: circle passes every suite and the report has the documented shape") {
  const Run r = run({"check", "builtin:circle", "--suite", "all"});
  CHECK(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("artifact_version") == kArtifactVersion);
  CHECK(doc.at("spec").at("name") == "circle");
  CHECK(doc.at("spec").at("dim") == 2);
  CHECK(doc.at("spec").at("seed") == 42);
  REQUIRE(doc.at("checks").size() >= 10);
  for (const json& c : doc.at("checks")) {
    CAPTURE(c.dump());
    CHECK(c.at("pass") == true);
    CHECK(c.contains("tolerance"));
    CHECK(c.at("verification") == "sampled");
    CHECK(c.at("runtime_ms") == 0.0);
    for (const char* key : {"check_name", "kind", "samples", "worst_value", "worst_point", "failures", "extras"})
      CHECK(c.contains(key));
  }
}

TEST_CASE("check: raw s fails the full suite with worst value -2") {
  const Run r = run({"check", "builtin:paper_example_s", "--suite", "full"});
  CHECK(r.code == 1);
  const json doc = json::parse(r.out);
  REQUIRE(doc.at("checks").size() == 1);
  CHECK(doc.at("checks")[0].at("worst_value").get<double>() == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(doc.at("checks")[0].at("pass") == false);
}

TEST_CASE("check: input errors exit 2") {
  CHECK(run({"check", "/nonexistent/spec.json"}).code == 2);
  CHECK(run({"check", "builtin:nosuch"}).code == 2);
  CHECK(run({"check", "builtin:circle", "--suite", "bogus"}).code == 2);
  CHECK(run({"check", "builtin:circle", "--samples", "0"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);

  const fs::path bad_json = scratch("bad.json");
  write_file(bad_json, "{ not json");
  CHECK(run({"check", bad_json.string()}).code == 2);

  const fs::path bad_expr = scratch("bad_expr.json");
  write_file(bad_expr, R"({"name":"b","dim":2,"expr":"x1 + * x2","region":{"lo":[-1,-1],"hi":[1,1]},"seed_point":[0,0]})");
  const Run e = run({"check", bad_expr.string()});
  CHECK(e.code == 2);
  CHECK(e.err.find('\n') == e.err.size() - 1);

  const fs::path bad_box = scratch("bad_box.json");
  write_file(bad_box, R"({"name":"b","dim":2,"expr":"x2","region":{"lo":[1,-1],"hi":[1,1]},"seed_point":[0,0]})");
  CHECK(run({"check", bad_box.string()}).code == 2);

  const fs::path bad_dim = scratch("bad_dim.json");
  write_file(bad_dim, R"({"name":"b","dim":2,"expr":"x3","region":{"lo":[-1,-1],"hi":[1,1]},"seed_point":[0,0]})");
  CHECK(run({"check", bad_dim.string()}).code == 2);

  const fs::path no_boundary = scratch("no_boundary.json");
  write_file(no_boundary,
             R"({"name":"b","dim":2,"expr":"x1^2 + x2^2 + 1","region":{"lo":[-1,-1],"hi":[1,1]},"seed_point":[0,0]})");
  CHECK(run({"check", no_boundary.string()}).code == 2);
}

TEST_CASE("check: spec files load and reports are bit-identical across runs") {
  const fs::path spec = scratch("ellipse.json");
  write_file(spec, spec_to_json(builtin_spec("ellipse")));
  const Run a = run({"check", spec.string(), "--suite", "delta", "--samples", "24"});
  const Run b = run({"check", spec.string(), "--suite", "delta", "--samples", "24"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Run other = run({"check", spec.string(), "--suite", "delta", "--samples", "24", "--seed", "7"});
  CHECK(other.out != a.out);

  const fs::path out = scratch("report.json");
  fs::remove(out);
  const Run w = run({"check", spec.string(), "--suite", "delta", "--samples", "24", "--out", out.string()});
  CHECK(w.code == 0);
  CHECK(w.out.empty());
  CHECK(read_file(out) == a.out);

  const Run timed = run({"check", "builtin:circle", "--suite", "boundary", "--timings"});
  const json timed_doc = json::parse(timed.out);
  bool some_positive = false;
  for (const json& c : timed_doc.at("checks")) some_positive |= c.at("runtime_ms").get<double>() > 0.0;
  CHECK(some_positive);
}

TEST_CASE("check: numbers round-trip exactly") {
  const Run r = run({"check", "builtin:ellipse", "--suite", "boundary"});
  const json doc = json::parse(r.out);
  for (const json& c : doc.at("checks")) {
    const double v = c.at("worst_value").get<double>();
    CHECK(json::parse(json(v).dump()).get<double>() == v);
  }
  CHECK(r.out.find(",0") == std::string::npos);  // no locale decimal commas
}

TEST_CASE("convexify: s2 at the origin and the CSV of eigenvalues") {
  const fs::path csv_path = scratch("s2.csv");
  const Run r = run({"convexify", "builtin:paper_example_s2", "--center", "0,0", "--emit-csv", csv_path.string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("stage") == "fully_convex");
  const double K = doc.at("constants").at("K").get<double>();
  CHECK(K > 0.0);
  CHECK(doc.at("constants").at("alpha").get<double>() > 0.0);
  CHECK(doc.at("constants").at("beta").get<double>() > 0.0);
  CHECK(doc.at("patch_radius").get<double>() > 0.0);
  bool has_full = false;
  for (const json& c : doc.at("checks")) {
    CHECK(c.at("pass") == true);
    has_full |= c.at("check_name") == "full_convexity";
  }
  CHECK(has_full);

  const auto rows = read_csv(read_file(csv_path));
  REQUIRE(rows.size() > 10);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "min_eigenvalue_before", "min_eigenvalue_after"});
  int on_axis = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 4);
    const double x = std::stod(rows[i][0]), y = std::stod(rows[i][1]);
    CHECK(std::stod(rows[i][3]) >= -1e-8);
    if (x == 0.0 && y > 0.0) {
      // On the inward-normal axis the r1 Hessian has eigenvalues −4(1+2Ky)y³ and 2K.
      const double want = -4.0 * (1.0 + 2.0 * K * y) * y * y * y;
      CHECK(std::stod(rows[i][2]) == doctest::Approx(want).epsilon(1e-6));
      ++on_axis;
    }
  }
  CHECK(on_axis == 4);
}

TEST_CASE("convexify: circle succeeds with small constants, hyperbola and bad centres fail") {
  const Run c = run({"convexify", "builtin:circle"});
  CHECK(c.code == 0);
  const json doc = json::parse(c.out);
  for (const char* k : {"K", "alpha", "beta"}) {
    CHECK(doc.at("constants").at(k).get<double>() > 0.0);
    CHECK(doc.at("constants").at(k).get<double>() < 10.0);
  }

  const Run h = run({"convexify", "builtin:hyperbola"});
  CHECK(h.code == 1);
  const json hd = json::parse(h.out);
  CHECK(hd.contains("error"));
  CHECK(hd.at("checks")[0].at("check_name") == "tangential_convexity");
  CHECK(hd.at("checks")[0].at("pass") == false);

  CHECK(run({"convexify", "builtin:peanut"}).code == 1);
  CHECK(run({"convexify", "builtin:circle", "--center", "0,0"}).code == 2);
  CHECK(run({"convexify", "builtin:circle", "--center", "1,0,0"}).code == 2);
  CHECK(run({"convexify", "builtin:circle", "--center", "1,abc"}).code == 2);

  const Run a = run({"convexify", "builtin:ellipse"});
  const Run b = run({"convexify", "builtin:ellipse"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("distance: circle grid") {
  const Run r = run({"distance", "builtin:circle", "--grid", "21,21"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 442);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "delta", "grad_delta1", "grad_delta2", "min_eig_series",
                                            "geomseries_residual", "status"});
  int ok = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 8);
    const double x = std::stod(rows[i][0]), y = std::stod(rows[i][1]);
    if (x == 0.0 && y == 0.0) CHECK(rows[i][7] == "unreachable");
    if (rows[i][7] != "ok") continue;
    ++ok;
    CHECK(std::stod(rows[i][2]) == doctest::Approx(std::hypot(x, y) - 1.0).epsilon(1e-10));
    CHECK(std::stod(rows[i][6]) <= 1e-4);
  }
  CHECK(ok > 50);
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("distance: half-space grid, points files and input errors") {
  const Run h = run({"distance", "builtin:halfspace", "--grid", "5,7"});
  REQUIRE(h.code == 0);
  const auto rows = read_csv(h.out);
  REQUIRE(rows.size() == 36);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][7] == "ok");
    CHECK(std::stod(rows[i][2]) == std::stod(rows[i][1]));
  }

  const fs::path pts = scratch("points.csv");
  write_file(pts, "x1,x2\n1.2,0\n0,0\n0.3,0.9\n");
  const Run p = run({"distance", "builtin:circle", "--points", pts.string()});
  REQUIRE(p.code == 0);
  const auto prow = read_csv(p.out);
  REQUIRE(prow.size() == 4);
  CHECK(std::stod(prow[1][2]) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(prow[2][7] == "unreachable");

  CHECK(run({"distance", "builtin:circle", "--grid", ""}).code == 2);
  CHECK(run({"distance", "builtin:circle", "--grid", "0,3"}).code == 2);
  CHECK(run({"distance", "builtin:circle", "--grid", "3"}).code == 2);
  CHECK(run({"distance", "builtin:circle"}).code == 2);
  CHECK(run({"distance", "builtin:circle", "--grid", "3,3", "--points", pts.string()}).code == 2);
  const fs::path empty = scratch("empty.csv");
  write_file(empty, "x1,x2\n");
  CHECK(run({"distance", "builtin:circle", "--points", empty.string()}).code == 2);
}

TEST_CASE("corpus listing and help") {
  const Run l = run({"corpus"});
  CHECK(l.code == 0);
  for (const char* name : {"halfspace", "circle", "ellipse", "superellipse4", "paper_example_s", "paper_example_s2",
                           "peanut"})
    CHECK(l.out.find(std::string(name) + "\n") != std::string::npos);
  const Run one = run({"corpus", "superellipse4"});
  CHECK(one.code == 0);
  const DomainSpec back = parse_spec_json(one.out);
  CHECK(back.expr_text() == builtin_spec("superellipse4").expr_text());
  CHECK(back.collar_radius() == builtin_spec("superellipse4").collar_radius());
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("the installed tool reports the same exit codes") {
  CHECK(tool_exit("check builtin:circle --suite boundary") == 0);
  CHECK(tool_exit("check builtin:paper_example_s --suite full") == 1);
  CHECK(tool_exit("check /nonexistent.json") == 2);
}
