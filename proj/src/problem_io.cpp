#include "cycdr/problem_io.hpp"

#include <fstream>

#include "cycdr/errors.hpp"

namespace cycdr {

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kRngName = "mt19937_64/u53";

nlohmann::json range(double lo, double hi) { return nlohmann::json::array({lo, hi}); }

nlohmann::json vector_to_json(const Vec<double>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                    const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T as(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

Vec<double> vector_from_json(const nlohmann::json& j, Index n, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  if (static_cast<Index>(j.size()) != n)
    throw ParseError(where + ": expected " + std::to_string(n) + " coordinates, got " +
                     std::to_string(j.size()));
  Vec<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = as<double>(j[static_cast<std::size_t>(i)], where);
  return v;
}

ConvexSet<double> set_from_json(const nlohmann::json& j, Index n, const std::string& where) {
  const std::string kind = as<std::string>(require_field(j, "kind", where), where + ".kind");
  try {
    if (kind == "ball") {
      return Ball<double>(vector_from_json(require_field(j, "center", where), n, where + ".center"),
                          as<double>(require_field(j, "radius", where), where + ".radius"));
    }
    if (kind == "slab") {
      return Slab<double>(vector_from_json(require_field(j, "normal", where), n, where + ".normal"),
                          as<double>(require_field(j, "halfwidth", where), where + ".halfwidth"));
    }
    if (kind == "hyperplane") {
      return Hyperplane<double>(
          vector_from_json(require_field(j, "normal", where), n, where + ".normal"),
          as<double>(require_field(j, "offset", where), where + ".offset"));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ".kind: unknown kind '" + kind + "'");
}

struct RangeField {
  const char* name;
  double* lo;
  double* hi;
};

std::vector<RangeField> range_fields(GeneratorParams& p) {
  return {{"normal_coord_range", &p.normal_coord_lo, &p.normal_coord_hi},
          {"halfwidth_range", &p.halfwidth_lo, &p.halfwidth_hi},
          {"center_coord_range", &p.center_coord_lo, &p.center_coord_hi},
          {"radius_slack_range", &p.radius_slack_lo, &p.radius_slack_hi},
          {"x0_range", &p.x0_lo, &p.x0_hi}};
}

}  // namespace

nlohmann::json problem_to_json(const FeasibilityProblem<double>& problem) {
  GeneratorParams params = problem.meta.params;
  nlohmann::json params_json = {{"rng", kRngName}};
  for (const auto& field : range_fields(params)) params_json[field.name] = range(*field.lo, *field.hi);

  nlohmann::json sets = nlohmann::json::array();
  for (const auto& set : problem.sets) {
    std::visit(
        [&sets](const auto& s) {
          using Set = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<Set, Ball<double>>) {
            sets.push_back({{"kind", "ball"}, {"center", vector_to_json(s.center)}, {"radius", s.radius}});
          } else if constexpr (std::is_same_v<Set, Slab<double>>) {
            sets.push_back(
                {{"kind", "slab"}, {"normal", vector_to_json(s.normal)}, {"halfwidth", s.halfwidth}});
          } else {
            sets.push_back(
                {{"kind", "hyperplane"}, {"normal", vector_to_json(s.normal)}, {"offset", s.offset}});
          }
        },
        set);
  }

  return {{"version", kSchemaVersion},
          {"family", to_string(problem.meta.family)},
          {"seed", problem.meta.seed},
          {"n", problem.n},
          {"m", problem.m()},
          {"params", params_json},
          {"sets", std::move(sets)}};
}

FeasibilityProblem<double> problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("problem: top level must be an object");
  const int version = as<int>(require_field(j, "version", "problem"), "problem.version");
  if (version != kSchemaVersion)
    throw ParseError("problem.version: unsupported version " + std::to_string(version));

  FeasibilityProblem<double> problem;
  problem.n = as<Index>(require_field(j, "n", "problem"), "problem.n");
  if (problem.n < 1) throw ParseError("problem.n: must be >= 1");
  const auto m = as<Index>(require_field(j, "m", "problem"), "problem.m");
  if (m < 1) throw ParseError("problem.m: must be >= 1");

  try {
    problem.meta.family =
        family_from_string(as<std::string>(require_field(j, "family", "problem"), "problem.family"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("problem.family: ") + e.what());
  }
  problem.meta.seed = as<std::uint64_t>(require_field(j, "seed", "problem"), "problem.seed");

  problem.meta.params.n = problem.n;
  problem.meta.params.m = m;
  problem.meta.params.seed = problem.meta.seed;
  if (const auto it = j.find("params"); it != j.end()) {
    for (const auto& field : range_fields(problem.meta.params)) {
      if (const auto rit = it->find(field.name); rit != it->end()) {
        const std::string where = std::string("problem.params.") + field.name;
        if (!rit->is_array() || rit->size() != 2) throw ParseError(where + ": expected [lo, hi]");
        *field.lo = as<double>((*rit)[0], where);
        *field.hi = as<double>((*rit)[1], where);
      }
    }
  }

  const auto& sets = require_field(j, "sets", "problem");
  if (!sets.is_array()) throw ParseError("problem.sets: expected an array");
  if (static_cast<Index>(sets.size()) != m)
    throw ParseError("problem.sets: expected m = " + std::to_string(m) + " sets, got " +
                     std::to_string(sets.size()));
  problem.sets.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i)
    problem.sets.push_back(
        set_from_json(sets[i], problem.n, "problem.sets[" + std::to_string(i) + "]"));
  problem.validate();
  return problem;
}

void save_problem(const FeasibilityProblem<double>& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << problem_to_json(problem).dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

FeasibilityProblem<double> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace cycdr
