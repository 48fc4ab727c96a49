#include "cycdr/problem.hpp"

#include "cycdr/rng.hpp"

namespace cycdr {

std::string to_string(Family family) {
  switch (family) {
    case Family::linear: return "linear";
    case Family::quadratic: return "quadratic";
    case Family::custom: return "custom";
  }
  throw std::logic_error("to_string(Family): unreachable");
}

Family family_from_string(const std::string& name) {
  if (name == "linear") return Family::linear;
  if (name == "quadratic") return Family::quadratic;
  if (name == "custom") return Family::custom;
  throw std::invalid_argument("unknown family '" + name + "' (expected linear|quadratic|custom)");
}

namespace {

void check_sizes(const GeneratorParams& params) {
  if (params.n < 1) throw std::invalid_argument("generator: n must be >= 1");
  if (params.m < 1) throw std::invalid_argument("generator: m must be >= 1");
}

Vec<double> draw_vector(Rng& rng, Index n, double lo, double hi) {
  Vec<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = uniform_in(rng, lo, hi);
  return v;
}

}  // namespace

FeasibilityProblem<double> generate_linear(const GeneratorParams& params) {
  check_sizes(params);
  Rng rng(params.seed);
  FeasibilityProblem<double> problem;
  problem.n = params.n;
  problem.sets.reserve(static_cast<std::size_t>(params.m));
  for (Index i = 0; i < params.m; ++i) {
    Vec<double> normal = draw_vector(rng, params.n, params.normal_coord_lo, params.normal_coord_hi);
    while (normal.norm() == 0.0)
      normal = draw_vector(rng, params.n, params.normal_coord_lo, params.normal_coord_hi);
    double halfwidth = uniform_in(rng, params.halfwidth_lo, params.halfwidth_hi);
    while (halfwidth == 0.0)
      halfwidth = uniform_in(rng, params.halfwidth_lo, params.halfwidth_hi);
    normal /= normal.norm();
    problem.sets.emplace_back(Slab<double>(std::move(normal), halfwidth));
  }
  problem.meta = ProblemMetadata{Family::linear, params.seed, params};
  return problem;
}

FeasibilityProblem<double> generate_quadratic(const GeneratorParams& params) {
  check_sizes(params);
  Rng rng(params.seed);
  FeasibilityProblem<double> problem;
  problem.n = params.n;
  problem.sets.reserve(static_cast<std::size_t>(params.m));
  for (Index i = 0; i < params.m; ++i) {
    Vec<double> center = draw_vector(rng, params.n, params.center_coord_lo, params.center_coord_hi);
    double slack = uniform_in(rng, params.radius_slack_lo, params.radius_slack_hi);
    while (slack == 0.0) slack = uniform_in(rng, params.radius_slack_lo, params.radius_slack_hi);
    const double radius = center.norm() + slack;
    problem.sets.emplace_back(Ball<double>(std::move(center), radius));
  }
  problem.meta = ProblemMetadata{Family::quadratic, params.seed, params};
  return problem;
}

Vec<double> generate_x0(const GeneratorParams& params) {
  if (params.n < 1) throw std::invalid_argument("generate_x0: n must be >= 1");
  Rng rng(params.seed);
  return draw_vector(rng, params.n, params.x0_lo, params.x0_hi);
}

}  // namespace cycdr
