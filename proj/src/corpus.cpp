#include "cvxdef/corpus.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "json.hpp"

namespace cvxdef {

namespace {

using nlohmann::json;

struct Entry {
  const char* name;
  const char* expr;
  Vector lo;
  Vector hi;
  Vector seed_point;
  std::optional<double> collar;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"halfspace", "x2", {-1, -1}, {1, 1}, {0, 0}, 2.0},
      {"circle", "x1^2 + x2^2 - 1", {-1.5, -1.5}, {1.5, 1.5}, {0.6, 0.8}, std::nullopt},
      {"ellipse", "x1^2/4 + x2^2 - 1", {-2.5, -1.5}, {2.5, 1.5}, {1.2, 0.8}, 0.4},
      {"superellipse4", "x1^4 + x2^4 - 1", {-1.5, -1.5}, {1.5, 1.5}, {1, 0}, 0.35},
      {"paper_example_s", "x2 - x2^2 + x1^2", {-0.3, -0.3}, {0.3, 0.3}, {0, 0}, 0.15},
      {"paper_example_s2", "x2 + x2*x1^2 + x1^4", {-0.4, -0.4}, {0.4, 0.4}, {0, 0}, 0.15},
      // Cassini oval with b/a = 1.1: pinched at the waist, so not convex.
      {"peanut", "(x1^2 + x2^2)^2 - 2*(x1^2 - x2^2) + 1 - 1.4641", {-1.8, -1}, {1.8, 1}, {0, 0.458257569495584}, 0.2},
      {"hyperbola", "x1^2 - x2^2 - 1", {0.5, -1}, {2, 1}, {1, 0}, 0.2},
  };
  return table;
}

Vector real_array(const json& doc, const char* key, std::size_t dim) {
  if (!doc.contains(key) || !doc.at(key).is_array()) throw SpecFileError(std::string("spec: '") + key + "' must be an array");
  const json& arr = doc.at(key);
  if (arr.size() != dim)
    throw SpecFileError(std::string("spec: '") + key + "' has length " + std::to_string(arr.size()) + ", expected " +
                        std::to_string(dim));
  Vector out;
  for (const json& v : arr) {
    if (!v.is_number()) throw SpecFileError(std::string("spec: '") + key + "' must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const Entry& e : entries()) out.emplace_back(e.name);
  return out;
}

DomainSpec builtin_spec(const std::string& name) {
  for (const Entry& e : entries())
    if (name == e.name) return DomainSpec(e.name, e.lo.size(), e.expr, Box{e.lo, e.hi}, e.seed_point, e.collar);
  throw SpecFileError("unknown builtin spec '" + name + "'");
}

DomainSpec parse_spec_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecFileError(std::string("spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecFileError("spec: top level must be an object");
  if (!doc.contains("name") || !doc.at("name").is_string()) throw SpecFileError("spec: 'name' must be a string");
  if (!doc.contains("dim") || !doc.at("dim").is_number_integer() || doc.at("dim").get<long long>() < 1)
    throw SpecFileError("spec: 'dim' must be a positive integer");
  if (!doc.contains("expr") || !doc.at("expr").is_string()) throw SpecFileError("spec: 'expr' must be a string");
  if (!doc.contains("region") || !doc.at("region").is_object()) throw SpecFileError("spec: 'region' must be an object");

  const auto dim = static_cast<std::size_t>(doc.at("dim").get<long long>());
  Box region{real_array(doc.at("region"), "lo", dim), real_array(doc.at("region"), "hi", dim)};
  Vector seed_point = real_array(doc, "seed_point", dim);

  std::optional<double> collar;
  if (doc.contains("collar_radius")) {
    if (!doc.at("collar_radius").is_number()) throw SpecFileError("spec: 'collar_radius' must be a number");
    collar = doc.at("collar_radius").get<double>();
  }
  std::uint64_t seed = 42;
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw SpecFileError("spec: 'seed' must be a non-negative integer");
    seed = doc.at("seed").get<std::uint64_t>();
  }
  return DomainSpec(doc.at("name").get<std::string>(), dim, doc.at("expr").get<std::string>(), std::move(region),
                    std::move(seed_point), collar, seed);
}

DomainSpec load_spec(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.starts_with(prefix)) return builtin_spec(source.substr(prefix.size()));
  std::ifstream in(source);
  if (!in) throw SpecFileError("cannot open spec file '" + source + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec_json(text.str());
}

std::string spec_to_json(const DomainSpec& spec, int indent) {
  json doc = {{"name", spec.name()},
              {"dim", spec.dim()},
              {"expr", spec.expr_text()},
              {"region", {{"lo", spec.region().lo}, {"hi", spec.region().hi}}},
              {"seed_point", spec.seed_point()}};
  if (spec.collar_radius_given()) doc["collar_radius"] = spec.collar_radius();
  doc["seed"] = spec.seed();
  return doc.dump(indent);
}

}  // namespace cvxdef
