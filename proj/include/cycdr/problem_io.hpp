#pragma once

#include <string>

#include <json.hpp>

#include "cycdr/problem.hpp"

namespace cycdr {

// Problem file schema (JSON, version 1):
// {
//   "version": 1,
//   "family": "linear" | "quadratic" | "custom",
//   "seed": <uint64>,
//   "n": <int>, "m": <int>,
//   "params": { "rng": "mt19937_64/u53", "<range name>": [lo, hi], ... },
//   "sets": [
//     {"kind": "ball", "center": [..n doubles..], "radius": r},
//     {"kind": "slab", "normal": [..], "halfwidth": b},
//     {"kind": "hyperplane", "normal": [..], "offset": c}
//   ]
// }
// Numbers round-trip exactly (shortest decimal form).

nlohmann::json problem_to_json(const FeasibilityProblem<double>& problem);
FeasibilityProblem<double> problem_from_json(const nlohmann::json& j);

void save_problem(const FeasibilityProblem<double>& problem, const std::string& path);
FeasibilityProblem<double> load_problem(const std::string& path);

}  // namespace cycdr
