#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cycdr/geometry.hpp"

namespace cycdr {

// Tally of work done by a solver run. Projections count evaluations of some
// set projection P_{C_i}; diagnostic projections (error reporting) are not
// included. Iterations are counted by the solver, one per algorithm step.
struct ProjectionCounter {
  std::uint64_t projections = 0;
  std::uint64_t iterations = 0;
};

namespace detail {

template <class Scalar>
Index shared_dimension(const std::vector<const ConvexSet<Scalar>*>& sets, const char* what) {
  if (sets.empty()) throw std::invalid_argument(std::string(what) + ": needs at least one set");
  const Index n = dimension(*sets.front());
  for (const auto* s : sets)
    if (dimension(*s) != n)
      throw std::invalid_argument(std::string(what) + ": sets have mixed dimensions");
  return n;
}

}  // namespace detail

// Douglas-Rachford operator over an ordered tuple of r >= 2 sets:
// T = (Id + V)/2 with V the composition of the r reflections, first set
// reflected first. Holds pointers into the owning problem, never copies;
// the problem must outlive the operator.
template <class Scalar>
class RSetsDROperator {
 public:
  explicit RSetsDROperator(std::vector<const ConvexSet<Scalar>*> sets)
      : sets_(std::move(sets)), dim_(detail::shared_dimension(sets_, "RSetsDROperator")) {
    if (sets_.size() < 2) throw std::invalid_argument("RSetsDROperator: needs r >= 2 sets");
  }

  Index r() const { return static_cast<Index>(sets_.size()); }
  Index dim() const { return dim_; }
  const std::vector<const ConvexSet<Scalar>*>& sets() const { return sets_; }

 private:
  std::vector<const ConvexSet<Scalar>*> sets_;
  Index dim_;
};

// V = R_{C_{r-1}} ... R_{C_1} R_{C_0}: reflect onto the first listed set
// first.
template <class Scalar>
Vec<Scalar> apply_composite_reflection(const RSetsDROperator<Scalar>& op, const Vec<Scalar>& x) {
  detail::require_dim(op.dim(), x, "apply_composite_reflection");
  Vec<Scalar> y = x;
  for (const auto* s : op.sets()) y = reflect(*s, y);
  return y;
}

// One application of T = (Id + V)/2; costs exactly r projections.
template <class Scalar>
Vec<Scalar> apply_dr(const RSetsDROperator<Scalar>& op, const Vec<Scalar>& x,
                     ProjectionCounter& counter) {
  Vec<Scalar> v = apply_composite_reflection(op, x);
  counter.projections += static_cast<std::uint64_t>(op.r());
  return Scalar(0.5) * (x + v);
}

// Composition of projections P_{C_0} P_{C_1} ... P_{C_{m-1}}: the last listed
// set is projected first, so the result lands in the first listed set.
template <class Scalar>
class ComposedProjections {
 public:
  explicit ComposedProjections(std::vector<const ConvexSet<Scalar>*> sets)
      : sets_(std::move(sets)), dim_(detail::shared_dimension(sets_, "ComposedProjections")) {}

  Index count() const { return static_cast<Index>(sets_.size()); }
  Index dim() const { return dim_; }
  const std::vector<const ConvexSet<Scalar>*>& sets() const { return sets_; }

 private:
  std::vector<const ConvexSet<Scalar>*> sets_;
  Index dim_;
};

template <class Scalar>
Vec<Scalar> apply_composed_projections(const ComposedProjections<Scalar>& op, const Vec<Scalar>& x,
                                       ProjectionCounter& counter) {
  detail::require_dim(op.dim(), x, "apply_composed_projections");
  Vec<Scalar> y = x;
  for (auto it = op.sets().rbegin(); it != op.sets().rend(); ++it) y = project(**it, y);
  counter.projections += static_cast<std::uint64_t>(op.count());
  return y;
}

// 2-sets-DR operator on the product of the m sets and the diagonal of H^m.
// The iterate is an m-tuple of points; projecting onto the product set is
// componentwise, projecting onto the diagonal replaces each component by the
// coordinate-wise average.
template <class Scalar>
class ProductSpaceDROperator {
 public:
  explicit ProductSpaceDROperator(std::vector<const ConvexSet<Scalar>*> sets)
      : sets_(std::move(sets)), dim_(detail::shared_dimension(sets_, "ProductSpaceDROperator")) {}

  Index m() const { return static_cast<Index>(sets_.size()); }
  Index dim() const { return dim_; }
  const std::vector<const ConvexSet<Scalar>*>& sets() const { return sets_; }

  // m copies of x0: the canonical embedding of a point of H into H^m.
  std::vector<Vec<Scalar>> initial_state(const Vec<Scalar>& x0) const {
    detail::require_dim(dim_, x0, "ProductSpaceDROperator::initial_state");
    return std::vector<Vec<Scalar>>(static_cast<std::size_t>(m()), x0);
  }

  // Iterate storage in scalars: m*n, versus n for the cyclic methods.
  std::uint64_t state_size() const {
    return static_cast<std::uint64_t>(m()) * static_cast<std::uint64_t>(dim_);
  }

 private:
  std::vector<const ConvexSet<Scalar>*> sets_;
  Index dim_;
};

// One product-space DR step. Counts m projections: the componentwise product
// projection evaluates each P_{C_i} once, while the diagonal averaging is not
// a projection onto any C_i and counts zero.
template <class Scalar>
std::vector<Vec<Scalar>> apply_product_dr(const ProductSpaceDROperator<Scalar>& op,
                                          const std::vector<Vec<Scalar>>& state,
                                          ProjectionCounter& counter) {
  const auto m = static_cast<std::size_t>(op.m());
  if (state.size() != m)
    throw std::invalid_argument("apply_product_dr: state must have one component per set");
  for (const auto& comp : state) detail::require_dim(op.dim(), comp, "apply_product_dr");

  std::vector<Vec<Scalar>> reflected(m);
  Vec<Scalar> avg = Vec<Scalar>::Zero(op.dim());
  for (std::size_t i = 0; i < m; ++i) {
    reflected[i] = reflect(*op.sets()[i], state[i]);
    avg += reflected[i];
  }
  avg /= Scalar(static_cast<double>(m));

  std::vector<Vec<Scalar>> next(m);
  for (std::size_t i = 0; i < m; ++i)
    next[i] = Scalar(0.5) * (state[i] + (Scalar(2) * avg - reflected[i]));
  counter.projections += static_cast<std::uint64_t>(m);
  return next;
}

// Diagonal average of the tuple: the H-space representative of a
// product-space iterate, and the point error metrics are evaluated at.
template <class Scalar>
Vec<Scalar> extract_candidate(const std::vector<Vec<Scalar>>& state) {
  if (state.empty()) throw std::invalid_argument("extract_candidate: empty tuple");
  Vec<Scalar> avg = Vec<Scalar>::Zero(state.front().size());
  for (const auto& comp : state) {
    if (comp.size() != avg.size())
      throw std::invalid_argument("extract_candidate: components have mixed dimensions");
    avg += comp;
  }
  return avg / Scalar(static_cast<double>(state.size()));
}

}  // namespace cycdr
