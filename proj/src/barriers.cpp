#include "bhl/barriers.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "bhl/errors.hpp"

namespace bhl {

namespace {
void check_common(double p, int N, double C0t) {
  if (!(p > 1.0)) throw BarrierError("invalid-p", "p must be > 1");
  if (N < 2) throw BarrierError("invalid-dimension", "N must be >= 2");
  if (!(C0t >= 0.0)) throw BarrierError("invalid-potential", "C0 must be >= 0");
}
}  // namespace

double lower_barrier_slack(const LowerBarrierParams& lp) {
  return std::pow(lp.a, lp.p - 1.0) * (lp.a * lp.p / std::pow(4.0, lp.alpha) - lp.N) - lp.C0t;
}

LowerBarrierParams lower_barrier_params(double p, int N, double C0t, double r, Point center) {
  check_common(p, N, C0t);
  if (!(r > 0.0)) throw BarrierError("invalid-radius", "r must be > 0");
  LowerBarrierParams lp;
  lp.p = p;
  lp.N = N;
  lp.C0t = C0t;
  lp.alpha = p / (p - 1.0);
  lp.r = r;
  lp.center = center;
  // the left side is increasing past its zero N 4^α / p
  double lo = N * std::pow(4.0, lp.alpha) / p;
  lp.a = lo;
  if (C0t == 0.0) return lp;
  double hi = 2.0 * lo;
  lp.a = hi;
  while (lower_barrier_slack(lp) < 0.0) {
    lo = hi;
    hi *= 2.0;
    lp.a = hi;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    lp.a = mid;
    if (lower_barrier_slack(lp) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  lp.a = hi;
  return lp;
}

double lower_barrier_profile(const LowerBarrierParams& lp, double s) {
  const double top = std::exp(-lp.a / std::pow(4.0, lp.alpha));
  const double bot = std::exp(-lp.a / std::pow(2.0, lp.alpha));
  return (std::exp(-lp.a * std::pow(s / lp.r, lp.alpha)) - bot) / (top - bot);
}

double eval_lower_barrier(const LowerBarrierParams& lp, Point x) {
  return lower_barrier_profile(lp, distance(x, lp.center));
}

double lower_barrier_slope(const LowerBarrierParams& lp, std::size_t samples) {
  // N_t(P) sits at distance r/2 - t from the center N_{r/2}(P)
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= samples; ++k) {
    double t = 0.5 * lp.r * static_cast<double>(k) / static_cast<double>(samples);
    best = std::min(best, lower_barrier_profile(lp, 0.5 * lp.r - t) / (t / lp.r));
  }
  return best;
}

double choose_b(const RadialEigenpair& eig, double r, double C0t, double offset) {
  for (double b = 2.0 / 3.0; b > 1e-6; b *= 0.5) {
    const double rb = r * b;
    const bool eigen_ok = eig.lambda1 / std::pow(rb, eig.p) >= (1.0 + C0t) * std::pow(r, -eig.p);
    const bool inside = offset + rb + 2.0 * rb <= r * (1.0 + 1e-12);
    if (eigen_ok && inside) return b;
  }
  throw BarrierError("no-b", "no admissible b on the dyadic ladder");
}

UpperBarrierParams upper_barrier_params(const DomainSpec& dom, Point P, double p, int N, double C0t, double r,
                                        double scale, std::optional<Point> Q) {
  check_common(p, N, C0t);
  if (!dom.on_boundary(P, 1e-9)) throw BarrierError("not-on-boundary", "P must lie on the boundary");
  UpperBarrierParams up;
  up.p = p;
  up.N = N;
  up.C0t = C0t;
  up.r = r;
  up.scale = scale;
  up.eigen = eigen_annulus_radial(p, N);
  const double offset = Q ? distance(P, *Q) : 0.0;
  up.b = choose_b(up.eigen, r, C0t, offset);
  up.rb = r * up.b;
  up.center = normal_point(dom, P, up.rb, NormalSide::outward);
  return up;
}

double eval_upper_barrier(const UpperBarrierParams& up, Point x) {
  const double s = distance(x, up.center) / up.rb;
  if (s < 1.0 - 1e-12 || s > 3.0 + 1e-12)
    throw BarrierError("domain", "point outside the annulus rb <= |x - center| <= 3rb");
  return up.scale * up.eigen.value(std::clamp(s, 1.0, 3.0));
}

double eigen_linear_bound(const RadialEigenpair& eig) {
  double C = 0.0;
  for (std::size_t k = 1; k < eig.s.size() && eig.s[k] <= 2.0 + 1e-12; ++k)
    C = std::max(C, eig.phi[k] / (eig.s[k] - 1.0));
  return C;
}

namespace {

CertificationReport certify(const std::function<double(double)>& profile, double p, int N, double kappa, Side side,
                            Point center, double r_in, double r_out, std::size_t n_r, std::size_t n_theta,
                            bool force_radial) {
  CertificationReport rep;
  rep.center = center;
  rep.r_in = r_in;
  rep.r_out = r_out;
  if (N == 2 && !force_radial) {
    rep.method = "grid2d";
    auto grid = std::make_shared<const PolarGrid>(
        build_annulus_grid(center, r_in, r_out, n_r, n_theta, 2.0 * std::numbers::pi));
    std::vector<double> v(grid->size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = profile(grid->r(grid->radial_index(k)));
    rep.side = side_condition_check(ScalarField(grid, std::move(v)), p, kappa, side);
  } else {
    rep.method = "radial";
    std::vector<double> s(n_r), v(n_r);
    for (std::size_t k = 0; k < n_r; ++k) {
      s[k] = r_in + (r_out - r_in) * static_cast<double>(k) / static_cast<double>(n_r - 1);
      v[k] = profile(s[k]);
    }
    rep.side = side_condition_check_radial(s, v, p, N, kappa, side);
  }
  return rep;
}

}  // namespace

CertificationReport certify_lower(const LowerBarrierParams& lp, std::size_t n_r, std::size_t n_theta,
                                  bool force_radial) {
  auto rep = certify([&](double s) { return lower_barrier_profile(lp, s); }, lp.p, lp.N,
                     lp.C0t * std::pow(lp.r, -lp.p), Side::subsolution, lp.center, lp.r / 4.0, lp.r / 2.0, n_r,
                     n_theta, force_radial);
  rep.barrier = "lower";
  rep.params = {{"p", lp.p}, {"N", lp.N}, {"C0", lp.C0t}, {"a", lp.a}, {"alpha", lp.alpha}, {"r", lp.r}};
  return rep;
}

CertificationReport certify_upper(const UpperBarrierParams& up, std::size_t n_r, std::size_t n_theta,
                                  bool force_radial) {
  auto rep = certify([&](double s) { return up.scale * up.eigen.value(std::clamp(s / up.rb, 1.0, 3.0)); }, up.p,
                     up.N, -(up.C0t + 1.0) * std::pow(up.r, -up.p), Side::supersolution, up.center, up.rb,
                     3.0 * up.rb, n_r, n_theta, force_radial);
  rep.barrier = "upper";
  rep.params = {{"p", up.p},   {"N", up.N},   {"C0", up.C0t},       {"r", up.r},
                {"b", up.b},   {"rb", up.rb}, {"lambda1", up.eigen.lambda1}, {"scale", up.scale}};
  return rep;
}

std::string certification_json(const CertificationReport& rep) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json params;
  params["barrier"] = rep.barrier;
  params["method"] = rep.method;
  for (auto& [k, v] : rep.params) params[k] = v;
  j["params"] = params;
  j["annulus"] = {{"center", {rep.center.x, rep.center.y}}, {"r_in", rep.r_in}, {"r_out", rep.r_out}};
  nlohmann::ordered_json fails = nlohmann::ordered_json::array();
  for (auto& f : rep.side.failures) fails.push_back({f.node, f.residual});
  j["failures"] = fails;
  j["tested"] = rep.side.tested;
  j["pass"] = rep.pass();
  return j.dump(2);
}

}  // namespace bhl
