#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cycdr/operators.hpp"
#include "cycdr/problem.hpp"
#include "cycdr/rng.hpp"

namespace cycdr {

// Mathematical modulus: result in [0, m-1] for any a, including negatives.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  if (m < 1) throw std::invalid_argument("mod_floor: modulus must be >= 1");
  const std::int64_t rem = a % m;
  return rem < 0 ? rem + m : rem;
}

// The d-th block of set indices (d >= 1), r indices advancing r-1 sets per
// block: (((r-1)d - (r-1)) mod m, ..., ((r-1)d) mod m). The last index of
// block d equals the first index of block d+1, and block(d + m) = block(d).
inline std::vector<Index> block_indices(Index m, Index r, std::uint64_t d) {
  if (m < 1) throw std::invalid_argument("block_indices: m must be >= 1");
  if (r < 2) throw std::invalid_argument("block_indices: r must be >= 2");
  if (d < 1) throw std::invalid_argument("block_indices: d must be >= 1");
  // Reduce d first (the schedule has period m), keeping the arithmetic far
  // from overflow for arbitrarily long runs.
  const std::int64_t d0 = static_cast<std::int64_t>((d - 1) % static_cast<std::uint64_t>(m));
  const std::int64_t base = static_cast<std::int64_t>(r - 1) * d0;
  std::vector<Index> indices(static_cast<std::size_t>(r));
  for (Index j = 0; j < r; ++j)
    indices[static_cast<std::size_t>(j)] = static_cast<Index>(mod_floor(base + j, m));
  return indices;
}

// Cyclic block schedule over m sets with blocks of size r, generated lazily
// from the block number.
struct BlockSchedule {
  Index m;
  Index r;

  BlockSchedule(Index m_, Index r_) : m(m_), r(r_) {
    if (m < 1) throw std::invalid_argument("BlockSchedule: m must be >= 1");
    if (r < 2) throw std::invalid_argument("BlockSchedule: r must be >= 2");
    if (r > m)
      throw std::invalid_argument("BlockSchedule: r must be <= m (a block of " +
                                  std::to_string(r) + " sets would repeat indices with m = " +
                                  std::to_string(m) + ")");
  }

  std::vector<Index> block(std::uint64_t d) const { return block_indices(m, r, d); }
};

template <class Scalar>
RSetsDROperator<Scalar> make_block_operator(const FeasibilityProblem<Scalar>& problem,
                                            const std::vector<Index>& indices) {
  std::vector<const ConvexSet<Scalar>*> sets;
  sets.reserve(indices.size());
  for (Index i : indices) sets.push_back(&problem.sets.at(static_cast<std::size_t>(i)));
  return RSetsDROperator<Scalar>(std::move(sets));
}

// The m distinct block operators S_1, ..., S_m; block d of a longer run is
// served by entry (d-1) mod m.
template <class Scalar>
std::vector<RSetsDROperator<Scalar>> cyclic_block_operators(const FeasibilityProblem<Scalar>& problem,
                                                            Index r) {
  const BlockSchedule schedule(problem.m(), r);
  std::vector<RSetsDROperator<Scalar>> blocks;
  blocks.reserve(static_cast<std::size_t>(problem.m()));
  for (Index d = 1; d <= problem.m(); ++d)
    blocks.push_back(make_block_operator(problem, schedule.block(static_cast<std::uint64_t>(d))));
  return blocks;
}

// A fixed composition of block operators, applied front to back.
template <class Scalar>
struct SweepOperator {
  std::vector<RSetsDROperator<Scalar>> blocks;
};

template <class Scalar>
Vec<Scalar> apply_sweep(const SweepOperator<Scalar>& sweep, Vec<Scalar> x,
                        ProjectionCounter& counter) {
  for (const auto& block : sweep.blocks) x = apply_dr(block, x, counter);
  return x;
}

// Full cycle Q = S_m ... S_2 S_1: m blocks, visiting every set r-1 times and
// finishing on set 0.
template <class Scalar>
SweepOperator<Scalar> build_full_cycle(const FeasibilityProblem<Scalar>& problem, Index r) {
  return SweepOperator<Scalar>{cyclic_block_operators(problem, r)};
}

// Short cycle over m/(r-1) blocks: one sweep touching each set once (plus the
// single-index overlaps). Only defined when r-1 divides m.
template <class Scalar>
SweepOperator<Scalar> build_short_cycle(const FeasibilityProblem<Scalar>& problem, Index r) {
  const Index m = problem.m();
  const BlockSchedule schedule(m, r);
  if (m % (r - 1) != 0)
    throw std::invalid_argument("build_short_cycle: r - 1 = " + std::to_string(r - 1) +
                                " must divide m = " + std::to_string(m) +
                                " for a short cycle to cover every set exactly once");
  const Index count = m / (r - 1);
  SweepOperator<Scalar> sweep;
  sweep.blocks.reserve(static_cast<std::size_t>(count));
  for (Index d = 1; d <= count; ++d)
    sweep.blocks.push_back(make_block_operator(problem, schedule.block(static_cast<std::uint64_t>(d))));
  return sweep;
}

// Composition of the projections onto all m sets, last set projected first.
template <class Scalar>
ComposedProjections<Scalar> composed_projections_over_all(const FeasibilityProblem<Scalar>& problem) {
  std::vector<const ConvexSet<Scalar>*> sets;
  sets.reserve(problem.sets.size());
  for (const auto& set : problem.sets) sets.push_back(&set);
  return ComposedProjections<Scalar>(std::move(sets));
}

// Random product of the full cycle (probability = bias) and the all-sets
// composed projections. Step k is a deterministic function of (seed, k).
template <class Scalar>
class RandomProduct {
 public:
  RandomProduct(SweepOperator<Scalar> sweep, ComposedProjections<Scalar> projections,
                std::uint64_t seed, double bias = 0.5)
      : sweep_(std::move(sweep)),
        projections_(std::move(projections)),
        coin_(seed),
        bias_(bias) {
    if (!(bias >= 0.0 && bias <= 1.0))
      throw std::invalid_argument("RandomProduct: coin bias must lie in [0, 1]");
  }

  Vec<Scalar> step(const Vec<Scalar>& x, ProjectionCounter& counter) {
    if (uniform_unit(coin_) < bias_) return apply_sweep(sweep_, x, counter);
    return apply_composed_projections(projections_, x, counter);
  }

 private:
  SweepOperator<Scalar> sweep_;
  ComposedProjections<Scalar> projections_;
  Rng coin_;
  double bias_;
};

}  // namespace cycdr
