#include <doctest.h>

#include <algorithm>

#include "cycdr/geometry.hpp"
#include "test_support.hpp"

using namespace cycdr;
using test::random_member;
using test::random_set;
using test::random_vec;
using test::vec2;

TEST_CASE("ball projection") {
  const Ball<double> ball(vec2(0, 0), 1.0);
  CHECK(project(ball, vec2(2, 0)).isApprox(vec2(1, 0), 1e-15));
  const Vec<double> inside = vec2(0.3, -0.2);
  CHECK(project(ball, inside) == inside);  // members come back bit for bit
  const Vec<double> boundary = vec2(1, 0);
  CHECK(project(ball, boundary) == boundary);
}

TEST_CASE("slab projection clamps the inner product") {
  const Slab<double> slab(vec2(1, 0), 0.5);
  CHECK(project(slab, vec2(2, 0)).isApprox(vec2(0.5, 0), 1e-15));
  CHECK(project(slab, vec2(-2, 3)).isApprox(vec2(-0.5, 3), 1e-15));
  const Vec<double> member = vec2(0.5, 7.0);  // boundary counts as member
  CHECK(project(slab, member) == member);
}

TEST_CASE("hyperplane projection") {
  const Hyperplane<double> plane(vec2(0, 1), 2.0);
  CHECK(project(plane, vec2(3, 7)).isApprox(vec2(3, 2), 1e-15));
  CHECK(project(plane, vec2(3, 2)) == vec2(3, 2));
}

TEST_CASE("reflection examples") {
  const Ball<double> ball(vec2(0, 0), 1.0);
  CHECK(reflect(ball, vec2(2, 0)).isApprox(vec2(0, 0), 1e-15));
  const Vec<double> inside = vec2(0.1, 0.1);
  CHECK(reflect(ball, inside) == inside);
  const Slab<double> axis(vec2(0, 1), 0.0);
  CHECK(reflect(axis, vec2(1, 1)).isApprox(vec2(1, -1), 1e-15));
}

TEST_CASE("membership residual") {
  const Ball<double> ball(vec2(0, 0), 1.0);
  CHECK(membership_residual(ball, vec2(2, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(membership_residual(ball, vec2(0.2, 0)) == 0.0);
  const Slab<double> slab(vec2(1, 0), 0.5);
  CHECK(membership_residual(slab, vec2(2, 0)) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(Ball<double>(vec2(0, 0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Ball<double>(vec2(0, 0), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Slab<double>(vec2(0, 0), 1.0), std::invalid_argument);  // zero normal
  CHECK_THROWS_AS(Slab<double>(vec2(1, 0), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(Hyperplane<double>(vec2(0, 0), 1.0), std::invalid_argument);
  Vec<double> bad = vec2(1, 0);
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Ball<double>(bad, 1.0), std::invalid_argument);

  // Non-unit normals are normalized and the offset rescales with them.
  const Slab<double> slab(vec2(2, 0), 1.0);
  CHECK(slab.normal == vec2(1, 0));
  CHECK(slab.halfwidth == 0.5);
  const Hyperplane<double> plane(vec2(0, -4), 2.0);
  CHECK(plane.normal == vec2(0, -1));
  CHECK(plane.offset == 0.5);

  // Zero halfwidth is a legal degenerate slab; it projects like a hyperplane.
  const Slab<double> thin(vec2(1, 0), 0.0);
  const Hyperplane<double> same(vec2(1, 0), 0.0);
  const Vec<double> x = vec2(3, 4);
  CHECK(project(thin, x) == project(same, x));
}

TEST_CASE("dimension mismatch is rejected") {
  const Ball<double> ball(vec2(0, 0), 1.0);
  Vec<double> x3(3);
  x3 << 1, 2, 3;
  CHECK_THROWS_AS(project(ball, x3), std::invalid_argument);
  CHECK_THROWS_AS(reflect(ball, x3), std::invalid_argument);
  CHECK_THROWS_AS(membership_residual(ball, x3), std::invalid_argument);
  const ConvexSet<double> as_variant = ball;
  CHECK_THROWS_AS(project(as_variant, x3), std::invalid_argument);
}

TEST_CASE("projection is idempotent") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const ConvexSet<double> set = random_set(rng, n);
    const Vec<double> x = random_vec(rng, n);
    const Vec<double> p = project(set, x);
    CHECK((project(set, p) - p).norm() <= 1e-12);
  }
}

TEST_CASE("projection is firmly nonexpansive") {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const ConvexSet<double> set = random_set(rng, n);
    const Vec<double> x = random_vec(rng, n);
    const Vec<double> y = random_vec(rng, n);
    const Vec<double> px = project(set, x);
    const Vec<double> py = project(set, y);
    CHECK((px - py).dot(x - y) >= (px - py).squaredNorm() - 1e-10);
  }
}

TEST_CASE("reflection is nonexpansive") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const ConvexSet<double> set = random_set(rng, n);
    const Vec<double> x = random_vec(rng, n);
    const Vec<double> y = random_vec(rng, n);
    CHECK((reflect(set, x) - reflect(set, y)).norm() <= (x - y).norm() + 1e-10);
  }
}

TEST_CASE("projection satisfies the variational inequality") {
  Rng rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const ConvexSet<double> set = random_set(rng, n);
    const Vec<double> x = random_vec(rng, n);
    const Vec<double> p = project(set, x);
    const Vec<double> y = random_member(rng, set);
    const double inner = (x - p).dot(p - y);
    CHECK(inner >= -1e-10);
    // Affine sets turn the inequality into an equality.
    if (std::holds_alternative<Hyperplane<double>>(set)) CHECK(std::abs(inner) <= 1e-10);
  }
}

TEST_CASE("geometry instantiates for other scalars") {
  Vec<float> center(2);
  center << 0.f, 0.f;
  const Ball<float> ball(center, 1.f);
  Vec<float> x(2);
  x << 2.f, 0.f;
  const Vec<float> p = project(ball, x);
  CHECK(p[0] == doctest::Approx(1.f));
  CHECK(membership_residual(ball, x) == doctest::Approx(1.f));
  const ConvexSet<float> as_variant = ball;
  CHECK(reflect(as_variant, x)[0] == doctest::Approx(0.f));
}

TEST_CASE("slab projection matches the 1-d clamp oracle") {
  Rng rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    const Slab<double> slab(random_vec(rng, n, -1.0, 1.0), uniform_in(rng, 0.0, 2.0));
    const Vec<double> x = random_vec(rng, n);
    const double t = slab.normal.dot(x);
    const double clamped = std::clamp(t, -slab.halfwidth, slab.halfwidth);
    const Vec<double> oracle = x + (clamped - t) * slab.normal;
    CHECK((project(slab, x) - oracle).norm() <= 1e-12);
  }
}
