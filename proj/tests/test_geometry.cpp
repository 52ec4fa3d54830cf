#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bhl/errors.hpp"
#include "bhl/geometry.hpp"

using namespace bhl;
constexpr double pi = std::numbers::pi;

TEST_CASE("distance to the boundary of a half-disk") {
  auto dom = DomainSpec::half_disk(1.0);
  CHECK(distance_to_boundary(dom, {0.0, 0.5}) == doctest::Approx(0.5));
  CHECK(distance_to_boundary(dom, {0.3, 0.1}) == doctest::Approx(0.1));
  // near the arc: 1 - |x|
  CHECK(distance_to_boundary(dom, {0.0, 0.9}) == doctest::Approx(0.1));
  CHECK(distance_to_boundary(dom, {0.5, 0.0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(distance_to_boundary(dom, {0.0, -0.1}), GeometryError);
}

TEST_CASE("sector distance uses both rays") {
  auto dom = DomainSpec::sector(pi / 2, 10.0);
  CHECK(distance_to_boundary(dom, {1.0, 2.0}) == doctest::Approx(1.0));
  CHECK(distance_to_boundary(dom, {3.0, 2.0}) == doctest::Approx(2.0));
  // opening 3π/2: a point in the third quadrant sees the ray θ = 3π/2 (the negative y axis)
  auto wide = DomainSpec::sector(3 * pi / 2, 10.0);
  CHECK(distance_to_boundary(wide, {-1.0, -3.0}) == doctest::Approx(1.0));
  CHECK(wide.contains({-1.0, -3.0}));
  CHECK_FALSE(wide.contains({1.0, -3.0}));
}

TEST_CASE("normal points sit at the requested distance") {
  auto dom = DomainSpec::half_disk(1.0);
  Point P{0.25, 0.0};
  Point in = normal_point(dom, P, 0.1, NormalSide::inward);
  Point out = normal_point(dom, P, 0.1, NormalSide::outward);
  CHECK(in.x == doctest::Approx(0.25));
  CHECK(in.y == doctest::Approx(0.1));
  CHECK(out.y == doctest::Approx(-0.1));
  CHECK(distance_to_boundary(dom, in) == doctest::Approx(0.1));
  CHECK_THROWS_AS(normal_point(dom, {0.25, 0.1}, 0.1, NormalSide::inward), GeometryError);
}

TEST_CASE("polygons are not C2 so normal points are refused") {
  auto poly = DomainSpec::lipschitz_polygon({{-1, 0}, {1, 0}, {1, 1}, {0, 0.5}, {-1, 1}});
  CHECK_FALSE(poly.is_c2_near_origin());
  CHECK(poly.lipschitz_constant() >= 0.5);
  try {
    normal_point(poly, {0.0, 0.0}, 0.1, NormalSide::inward);
    FAIL("expected an error");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == "not-c2");
    CHECK(e.module() == Module::geometry);
  }
}

TEST_CASE("chain of balls passes its own audit") {
  auto dom = DomainSpec::half_disk(1.0);
  const Point Q{0.0, 0.0};
  const double r = 0.4;
  for (int h : {2, 4, 6}) {
    const double depth = r / std::ldexp(1.0, h);
    const Point x{-0.3, depth}, y{0.35, depth * 1.5};
    auto chain = chain_of_balls(dom, Q, r, x, y, h);
    CHECK(chain.balls.front().contains(x));
    CHECK(chain.balls.back().contains(y));
    CHECK(check_chain(dom, Q, r, x, y, chain.balls).empty());
    CHECK(chain.achieved_n0 >= 1);
  }
}

TEST_CASE("chain audit catches a broken chain") {
  auto dom = DomainSpec::half_disk(1.0);
  const Point Q{0.0, 0.0}, x{-0.3, 0.1}, y{0.3, 0.1};
  auto chain = chain_of_balls(dom, Q, 0.4, x, y, 2);
  REQUIRE(chain.balls.size() >= 3);
  // shrunken balls no longer overlap their neighbours
  for (auto& b : chain.balls) b.radius *= 1e-3;
  CHECK_FALSE(check_chain(dom, Q, 0.4, x, y, chain.balls).empty());
}

TEST_CASE("chain preconditions") {
  auto dom = DomainSpec::half_disk(1.0);
  CHECK_THROWS_AS(chain_of_balls(dom, {0.0, 0.0}, 0.4, {-0.3, 0.001}, {0.3, 0.1}, 2), GeometryError);
  CHECK_THROWS_AS(chain_of_balls(dom, {0.0, 0.5}, 0.4, {-0.3, 0.2}, {0.3, 0.1}, 2), GeometryError);
  CHECK_THROWS_AS(chain_of_balls(dom, {0.0, 0.0}, 0.4, {-0.7, 0.2}, {0.3, 0.1}, 2), GeometryError);
}

TEST_CASE("polar grid layout and tags") {
  auto dom = DomainSpec::half_disk(1.0);
  auto g = build_polar_grid(dom, 33, 17, 1.0 / 16.0);
  CHECK(g.size() == 33 * 17);
  CHECK(g.inner_radius() == doctest::Approx(1.0 / 16.0));
  CHECK(g.outer_radius() == doctest::Approx(1.0));
  CHECK(g.theta_extent() == doctest::Approx(pi));
  // log-uniform: constant ratio between radii
  const double q = g.r(1) / g.r(0);
  for (std::size_t i = 1; i < g.n_r(); ++i) CHECK(g.r(i) / g.r(i - 1) == doctest::Approx(q));
  CHECK(g.tag(g.id(0, 5)) == NodeTag::truncation_arc);
  CHECK(g.tag(g.id(32, 5)) == NodeTag::dirichlet_zero);
  CHECK(g.tag(g.id(10, 0)) == NodeTag::dirichlet_zero);
  CHECK(g.tag(g.id(10, 16)) == NodeTag::dirichlet_zero);
  CHECK(g.tag(g.id(10, 8)) == NodeTag::interior);
  CHECK(std::string(to_string(NodeTag::truncation_arc)) == "truncation-arc");
}

TEST_CASE("dyadic radial count is aligned across levels") {
  CHECK(dyadic_radial_count(1.0 / 8, 1.0, 16) == 49);
  CHECK(dyadic_radial_count(1.0 / 16, 1.0, 16) == 65);
  auto dom = DomainSpec::half_disk(1.0);
  auto a = build_polar_grid(dom, dyadic_radial_count(1.0 / 8, 1.0, 8), 9, 1.0 / 8);
  auto b = build_polar_grid(dom, dyadic_radial_count(1.0 / 16, 1.0, 8), 9, 1.0 / 16);
  for (std::size_t i = 0; i < a.n_r(); ++i) CHECK(a.r(i) == doctest::Approx(b.r(i + 8)).epsilon(1e-12));
}

TEST_CASE("interpolation reproduces bilinear functions of (log r, theta)") {
  auto dom = DomainSpec::half_disk(1.0);
  auto g = build_polar_grid(dom, 17, 17, 0.1);
  std::vector<double> v(g.size());
  for (std::size_t id = 0; id < g.size(); ++id)
    v[id] = std::log(g.r(g.radial_index(id))) + 2.0 * g.theta(g.angular_index(id));
  auto val = g.interpolate(v, 0.37, 1.1);
  REQUIRE(val.has_value());
  CHECK(*val == doctest::Approx(std::log(0.37) + 2.2).epsilon(1e-3));
  CHECK_FALSE(g.interpolate(v, 0.05, 1.0).has_value());
}

TEST_CASE("grid configuration errors") {
  auto dom = DomainSpec::half_disk(1.0);
  CHECK_THROWS_AS(build_polar_grid(dom, 1, 17, 0.1), GeometryError);
  CHECK_THROWS_AS(build_polar_grid(dom, 17, 17, 2.0), GeometryError);
  CHECK_THROWS_AS(DomainSpec::sector(-1.0), GeometryError);
}
