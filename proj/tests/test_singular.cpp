#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bhl/errors.hpp"
#include "bhl/singular.hpp"

using namespace bhl;
constexpr double pi = std::numbers::pi;

namespace {

LadderOptions small_opts() {
  LadderOptions o;
  o.K = 2;
  o.per_octave = 8;
  o.n_theta = 33;
  return o;
}

}  // namespace

TEST_CASE("harmonic ladder matches the exact truncated solution") {
  // with V = r^{-1} eta and zero data on r = 1: u_eps = V (1 - r^2) / (1 - eps^2)
  auto L = build_ladder(2.0, 0.0, small_opts());
  REQUIRE(L.fields.size() == 3);
  CHECK(L.profile.a == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t k = 0; k < L.fields.size(); ++k) {
    const auto& u = L.fields[k];
    const double e = L.epsilons[k];
    double err = 0.0, scale = 0.0;
    for (std::size_t id = 0; id < u.grid().size(); ++id) {
      const double r = u.grid().r(u.grid().radial_index(id)), th = u.grid().theta(u.grid().angular_index(id));
      const double exact = L.V(r, th) * (1 - r * r) / (1 - e * e);
      err = std::max(err, std::abs(u[id] - exact));
      scale = std::max(scale, exact);
    }
    CHECK(err / scale < 1e-2);
  }
}

TEST_CASE("ladder report: sandwich holds and levels decrease with eps") {
  for (double p : {1.5, 3.0}) {
    auto L = build_ladder(p, 1.0, small_opts());
    auto rep = analyze_ladder(L);
    CHECK(rep.sandwich_upper_violation == 0.0);
    CHECK(rep.sandwich_lower_violation == 0.0);
    CHECK(rep.decreasing_margin_min >= 0.0);
    CHECK(rep.sandwich_max > 0.0);
    CHECK(rep.convergence_diffs.size() == 2);
    auto js = ladder_json(rep);
    CHECK(js.find("monotonicity_min") != std::string::npos);
  }
}

TEST_CASE("scaled arc data scale the ladder") {
  auto o = small_opts();
  o.K = 1;
  auto L1 = build_ladder(3.0, 0.0, o);
  o.arc_scale = 2.5;
  auto L2 = build_ladder(3.0, 0.0, o);
  double umax = 0.0;
  for (double v : L1.fields.back().values()) umax = std::max(umax, v);
  for (std::size_t id = 0; id < L1.fields.back().grid().size(); ++id)
    CHECK(std::abs(L2.fields.back()[id] - 2.5 * L1.fields.back()[id]) <= 1e-6 * umax);
}

TEST_CASE("singular limit needs enough levels") {
  CHECK_THROWS_AS(singular_limit(build_ladder(2.0, 0.0, small_opts())), SingularError);
}

TEST_CASE("singular limit returns the finest level") {
  auto o = small_opts();
  o.K = 3;
  auto L = build_ladder(2.0, 1.0, o);
  LadderReport rep;
  auto u = singular_limit(L, &rep);
  CHECK(u.grid().inner_radius() == doctest::Approx(L.epsilons.back()));
  CHECK(rep.epsilons.size() == L.epsilons.size());
}

TEST_CASE("blow-up deviation vanishes for a separable field") {
  auto g = std::make_shared<const PolarGrid>(
      build_polar_grid(DomainSpec::half_disk(1.0), dyadic_radial_count(1.0 / 64, 1.0, 8), 65, 1.0 / 64));
  auto prof = exponent_for_opening(pi, 3.0, 2, ExponentKind::singular, 0.0, AngularGeometry::planar_sector);
  auto f = separable_field(prof, g).scaled(4.0);
  auto pts = blowup_rate(f, prof, {0.25, 0.125, 0.0625});
  for (auto& b : pts) CHECK(b.relative < 1e-6);
}

TEST_CASE("cone fit recovers the harmonic exponent") {
  ConeOptions o;
  o.per_octave = 12;
  o.n_theta = 65;
  auto fit = tolksdorff_cone_fit(pi / 2, 2.0, 0.0, o);
  CHECK(fit.beta_hat == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(fit.octave_slopes.size() >= 3);
}

TEST_CASE("inversion check separates harmonic fields from a negative control") {
  auto g = std::make_shared<const PolarGrid>(
      build_polar_grid(DomainSpec::half_disk(4.0), dyadic_radial_count(0.25, 4.0, 16), 65, 0.25));
  auto good = sample_field(g, [](Point x) { return x.y; });
  auto bad = sample_field(g, [](Point x) { return x.y * (1 + x.dot(x)); });
  CHECK(moebius_check(good, 2.0, 0.5, 2.0).residual < 1e-2);
  CHECK(moebius_check(bad, 2.0, 0.5, 2.0).residual > 1e-1);
  try {
    moebius_check(good, 2.0, 0.1, 2.0);
    FAIL("expected an error");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == "annulus-exits-grid");
  }
}
