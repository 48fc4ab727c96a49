#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace cycdr {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

namespace detail {

// Constructor-side tolerance for unit-norm checks; membership checks in
// tests use the looser 1e-10.
inline constexpr double kUnitNormTol = 1e-12;

template <class Scalar>
void require_finite(const Vec<Scalar>& v, const char* what) {
  if (!v.allFinite())
    throw std::invalid_argument(std::string(what) + ": coordinates must be finite");
}

template <class Scalar>
void require_dim(Index set_dim, const Vec<Scalar>& x, const char* what) {
  if (x.size() != set_dim)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (set has " +
                                std::to_string(set_dim) + ", point has " +
                                std::to_string(x.size()) + ")");
}

}  // namespace detail

// Closed ball { x : ||x - center|| <= radius }, radius > 0.
template <class Scalar>
struct Ball {
  Vec<Scalar> center;
  Scalar radius;

  Ball(Vec<Scalar> center_, Scalar radius_) : center(std::move(center_)), radius(radius_) {
    detail::require_finite(center, "Ball");
    if (center.size() < 1) throw std::invalid_argument("Ball: dimension must be >= 1");
    if (!(radius > Scalar(0)) || !std::isfinite(static_cast<double>(radius)))
      throw std::invalid_argument("Ball: radius must be finite and > 0");
  }
};

// Halfspace slab { x : |<normal, x>| <= halfwidth } with unit normal and
// halfwidth >= 0. The constructor normalizes the supplied normal and rescales
// the halfwidth by the same factor, so the set described is unchanged.
template <class Scalar>
struct Slab {
  Vec<Scalar> normal;
  Scalar halfwidth;

  Slab(Vec<Scalar> normal_, Scalar halfwidth_) : normal(std::move(normal_)), halfwidth(halfwidth_) {
    detail::require_finite(normal, "Slab");
    if (normal.size() < 1) throw std::invalid_argument("Slab: dimension must be >= 1");
    if (!(halfwidth >= Scalar(0)) || !std::isfinite(static_cast<double>(halfwidth)))
      throw std::invalid_argument("Slab: halfwidth must be finite and >= 0");
    const Scalar len = normal.norm();
    if (!(len > Scalar(0))) throw std::invalid_argument("Slab: normal must be nonzero");
    // Skip the division when the input is already unit to tolerance, so a
    // stored-and-reloaded slab keeps its exact coordinates.
    if (std::abs(static_cast<double>(len) - 1.0) > detail::kUnitNormTol) {
      normal /= len;
      halfwidth /= len;
    }
  }
};

// Hyperplane { x : <normal, x> = offset } with unit normal; offset rescales
// with the normal like the slab halfwidth does.
template <class Scalar>
struct Hyperplane {
  Vec<Scalar> normal;
  Scalar offset;

  Hyperplane(Vec<Scalar> normal_, Scalar offset_) : normal(std::move(normal_)), offset(offset_) {
    detail::require_finite(normal, "Hyperplane");
    if (normal.size() < 1) throw std::invalid_argument("Hyperplane: dimension must be >= 1");
    if (!std::isfinite(static_cast<double>(offset)))
      throw std::invalid_argument("Hyperplane: offset must be finite");
    const Scalar len = normal.norm();
    if (!(len > Scalar(0))) throw std::invalid_argument("Hyperplane: normal must be nonzero");
    if (std::abs(static_cast<double>(len) - 1.0) > detail::kUnitNormTol) {
      normal /= len;
      offset /= len;
    }
  }
};

// One projectable convex set. Every variant supplies an exact metric
// projection; geometry values are immutable once constructed.
template <class Scalar>
using ConvexSet = std::variant<Ball<Scalar>, Slab<Scalar>, Hyperplane<Scalar>>;

template <class Scalar>
Index dimension(const Ball<Scalar>& b) {
  return b.center.size();
}
template <class Scalar>
Index dimension(const Slab<Scalar>& s) {
  return s.normal.size();
}
template <class Scalar>
Index dimension(const Hyperplane<Scalar>& h) {
  return h.normal.size();
}
template <class Scalar>
Index dimension(const ConvexSet<Scalar>& set) {
  return std::visit([](const auto& s) { return dimension(s); }, set);
}

// Metric projection onto the ball: radial scaling outside, identity inside.
template <class Scalar>
Vec<Scalar> project(const Ball<Scalar>& b, const Vec<Scalar>& x) {
  detail::require_dim(b.center.size(), x, "project");
  Vec<Scalar> d = x - b.center;
  const Scalar dist = d.norm();
  if (dist <= b.radius) return x;
  return b.center + (b.radius / dist) * d;
}

// Projection onto the slab clamps t = <normal, x> into [-halfwidth, halfwidth]
// and moves x along the normal by the clamped difference. Members (boundary
// included) are returned unchanged, bit for bit.
template <class Scalar>
Vec<Scalar> project(const Slab<Scalar>& s, const Vec<Scalar>& x) {
  detail::require_dim(s.normal.size(), x, "project");
  const Scalar t = s.normal.dot(x);
  if (t > s.halfwidth) return x + (s.halfwidth - t) * s.normal;
  if (t < -s.halfwidth) return x + (-s.halfwidth - t) * s.normal;
  return x;
}

template <class Scalar>
Vec<Scalar> project(const Hyperplane<Scalar>& h, const Vec<Scalar>& x) {
  detail::require_dim(h.normal.size(), x, "project");
  const Scalar t = h.normal.dot(x) - h.offset;
  if (t == Scalar(0)) return x;
  return x - t * h.normal;
}

template <class Scalar>
Vec<Scalar> project(const ConvexSet<Scalar>& set, const Vec<Scalar>& x) {
  return std::visit([&](const auto& s) { return project(s, x); }, set);
}

// Reflection 2 P - Id. Fixed points are exactly the set members.
template <class Scalar, class SetLike>
Vec<Scalar> reflect(const SetLike& set, const Vec<Scalar>& x) {
  return Scalar(2) * project(set, x) - x;
}

// Distance from x to the set: ||P(x) - x||. Zero iff x is a member.
template <class Scalar, class SetLike>
Scalar membership_residual(const SetLike& set, const Vec<Scalar>& x) {
  return (project(set, x) - x).norm();
}

// Signed margin of the origin: positive when 0 lies in the interior, zero on
// the boundary, negative outside. Used by the generators to certify the
// instances they emit.
template <class Scalar>
Scalar origin_slack(const Ball<Scalar>& b) {
  return b.radius - b.center.norm();
}
template <class Scalar>
Scalar origin_slack(const Slab<Scalar>& s) {
  return s.halfwidth;
}
template <class Scalar>
Scalar origin_slack(const Hyperplane<Scalar>& h) {
  return -std::abs(h.offset);
}
template <class Scalar>
Scalar origin_slack(const ConvexSet<Scalar>& set) {
  return std::visit([](const auto& s) { return origin_slack(s); }, set);
}

}  // namespace cycdr
