#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "bhl/barriers.hpp"
#include "bhl/errors.hpp"

using namespace bhl;

namespace {

// smallest a with a^{p-1} (a p / 4^{p/(p-1)} - N) >= C0, by plain bisection on a wide bracket
double minimal_a_oracle(double p, int N, double C0) {
  const double q = std::pow(4.0, p / (p - 1.0));
  auto f = [&](double a) { return std::pow(a, p - 1.0) * (a * p / q - N) - C0; };
  double lo = N * q / p, hi = 1e6;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("minimal a: closed-form quadratic at p = 2, N = 2, C0 = 1") {
  // a (2a/16 - 2) = 1  <=>  a^2 - 16 a - 8 = 0
  const double closed = 8.0 + std::sqrt(72.0);
  CHECK(std::abs(lower_barrier_params(2.0, 2, 1.0).a - closed) < 1e-8);
}

TEST_CASE("minimal a agrees with an independent bisection") {
  for (double p : {1.5, 2.0, 3.0, 4.0})
    for (int N : {2, 3})
      for (double C0 : {0.0, 1.0, 5.0}) {
        auto lp = lower_barrier_params(p, N, C0);
        CHECK(lp.a == doctest::Approx(minimal_a_oracle(p, N, C0)).epsilon(1e-10));
        CHECK(lower_barrier_slack(lp) >= -1e-9);
      }
}

TEST_CASE("lower barrier profile shape") {
  auto lp = lower_barrier_params(3.0, 2, 1.0, 0.5);
  CHECK(lower_barrier_profile(lp, 0.125) == doctest::Approx(1.0));
  CHECK(lower_barrier_profile(lp, 0.25) == doctest::Approx(0.0).scale(1.0));
  double prev = 2.0;
  for (double s = 0.125; s <= 0.25; s += 0.01) {
    const double v = lower_barrier_profile(lp, s);
    CHECK(v <= prev);
    CHECK(v >= -1e-14);
    prev = v;
  }
  CHECK(lower_barrier_slope(lp) > 0.0);
}

TEST_CASE("lower barrier certifies at minimal a and fails at half of it") {
  for (double p : {2.0, 3.0})
    for (int N : {2, 3})
      for (double C0 : {0.0, 1.0}) {
        auto lp = lower_barrier_params(p, N, C0);
        auto rep = certify_lower(lp);
        CHECK(rep.pass());
        CHECK(rep.side.tested > 0);
        auto weak = lp;
        weak.a *= 0.5;
        CHECK_FALSE(certify_lower(weak).pass());
      }
}

TEST_CASE("certification is scale covariant") {
  auto lp = lower_barrier_params(3.0, 2, 1.0, 0.25, {0.3, 0.2});
  CHECK(certify_lower(lp).pass());
}

TEST_CASE("planar annulus eigenvalue matches the Bessel cross-product root") {
  // phi(s) = J0(k s) Y0(k) - J0(k) Y0(k s), lambda = k^2 with phi(3) = 0
  auto f = [](double k) {
    using namespace boost::math;
    return cyl_bessel_j(0, k) * cyl_neumann(0, 3 * k) - cyl_bessel_j(0, 3 * k) * cyl_neumann(0, k);
  };
  boost::math::tools::eps_tolerance<double> tol(50);
  auto [lo, hi] = boost::math::tools::bisect(f, 1.0, 2.0, tol);
  const double k = 0.5 * (lo + hi);
  CHECK(eigen_annulus_radial(2.0, 2).lambda1 == doctest::Approx(k * k).epsilon(1e-7));
}

TEST_CASE("upper barrier: b meets the eigenvalue condition and certifies") {
  auto dom = DomainSpec::half_disk(4.0);
  for (double p : {2.0, 3.0})
    for (int N : {2, 3})
      for (double C0 : {0.0, 1.0}) {
        auto up = upper_barrier_params(dom, {0.0, 0.0}, p, N, C0, 1.0);
        CHECK(up.eigen.lambda1 / std::pow(up.b, p) >= 1.0 + C0);
        CHECK(up.center.y == doctest::Approx(-up.rb));
        CHECK(certify_upper(up).pass());
      }
}

TEST_CASE("upper barrier evaluation and linear bound") {
  auto up = upper_barrier_params(DomainSpec::half_disk(4.0), {0.0, 0.0}, 2.0, 2, 0.0, 1.0, 2.0);
  CHECK(eval_upper_barrier(up, {0.0, 0.0}) == doctest::Approx(0.0).scale(1.0));
  CHECK(eval_upper_barrier(up, up.center + Point{0.0, 2.0 * up.rb}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(eval_upper_barrier(up, up.center), BarrierError);
  const double C = eigen_linear_bound(up.eigen);
  for (double s = 1.01; s <= 2.0; s += 0.05) CHECK(up.eigen.value(s) <= C * (s - 1.0) * (1 + 1e-12));
}

TEST_CASE("barrier errors") {
  CHECK_THROWS_AS(lower_barrier_params(1.0, 2, 0.0), BarrierError);
  CHECK_THROWS_AS(lower_barrier_params(2.0, 1, 0.0), BarrierError);
  CHECK_THROWS_AS(lower_barrier_params(2.0, 2, -1.0), BarrierError);
  CHECK_THROWS_AS(lower_barrier_params(2.0, 2, 0.0, 0.0), BarrierError);
  try {
    upper_barrier_params(DomainSpec::half_disk(4.0), {0.0, 1.0}, 2.0, 2, 0.0, 1.0);
    FAIL("expected an error");
  } catch (const BarrierError& e) {
    CHECK(e.kind() == "not-on-boundary");
  }
}

TEST_CASE("certification report serializes") {
  auto rep = certify_lower(lower_barrier_params(2.0, 2, 1.0));
  auto js = certification_json(rep);
  CHECK(js.find("\"pass\": true") != std::string::npos);
  CHECK(js.find("\"failures\"") != std::string::npos);
}
