#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cycdr/geometry.hpp"

namespace cycdr {

enum class Family { linear, quadratic, custom };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Draw ranges for the random instance generators; the defaults are the
// benchmark values (n = 1000, slab halfwidths in [0, 0.1], ball centers in
// [-5, 5]^n with radius ||center|| + [0, 0.1], starting points in [-10, 10]^n).
struct GeneratorParams {
  Index n = 1000;
  Index m = 1;
  std::uint64_t seed = 0;
  // linear family
  double normal_coord_lo = -1.0;
  double normal_coord_hi = 1.0;
  double halfwidth_lo = 0.0;
  double halfwidth_hi = 0.1;
  // quadratic family
  double center_coord_lo = -5.0;
  double center_coord_hi = 5.0;
  double radius_slack_lo = 0.0;
  double radius_slack_hi = 0.1;
  // starting points
  double x0_lo = -10.0;
  double x0_hi = 10.0;
};

struct ProblemMetadata {
  Family family = Family::custom;
  std::uint64_t seed = 0;
  GeneratorParams params;
};

// A convex feasibility instance: find a point in the intersection of the m
// sets. Generated instances always contain the origin in the interior of
// every set, so the intersection has nonempty interior.
template <class Scalar>
struct FeasibilityProblem {
  Index n = 0;
  std::vector<ConvexSet<Scalar>> sets;
  ProblemMetadata meta;

  Index m() const { return static_cast<Index>(sets.size()); }

  void validate() const {
    if (n < 1) throw std::invalid_argument("FeasibilityProblem: dimension must be >= 1");
    if (sets.empty()) throw std::invalid_argument("FeasibilityProblem: needs at least one set");
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (dimension(sets[i]) != n)
        throw std::invalid_argument("FeasibilityProblem: sets[" + std::to_string(i) +
                                    "] has dimension " + std::to_string(dimension(sets[i])) +
                                    ", expected " + std::to_string(n));
  }
};

// m slabs |<a_i, x>| <= b_i: raw normal coordinates uniform in
// [normal_coord_lo, normal_coord_hi] then normalized, halfwidth uniform in
// [halfwidth_lo, halfwidth_hi]. Zero-measure degenerate draws (zero normal,
// zero halfwidth) are redrawn so the origin keeps strictly positive slack.
FeasibilityProblem<double> generate_linear(const GeneratorParams& params);

// m balls: center coordinates uniform in [center_coord_lo, center_coord_hi],
// radius = ||center|| + slack with slack uniform in [radius_slack_lo,
// radius_slack_hi]; zero slack is redrawn.
FeasibilityProblem<double> generate_quadratic(const GeneratorParams& params);

// Starting point with coordinates uniform in [x0_lo, x0_hi].
Vec<double> generate_x0(const GeneratorParams& params);

// Smallest origin slack over the sets; > 0 certifies the origin as an
// interior point of the intersection.
template <class Scalar>
Scalar min_origin_slack(const FeasibilityProblem<Scalar>& problem) {
  Scalar best = origin_slack(problem.sets.front());
  for (const auto& set : problem.sets) best = std::min(best, origin_slack(set));
  return best;
}

}  // namespace cycdr
