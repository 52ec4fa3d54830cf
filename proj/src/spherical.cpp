#include "bhl/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bhl/errors.hpp"

namespace bhl {

const char* to_string(ExponentKind k) { return k == ExponentKind::regular ? "regular" : "singular"; }
const char* to_string(AngularGeometry g) {
  return g == AngularGeometry::planar_sector ? "planar-sector" : "axisymmetric-cap";
}

ExponentKind parse_exponent_kind(const std::string& s) {
  if (s == "regular") return ExponentKind::regular;
  if (s == "singular") return ExponentKind::singular;
  throw ExponentError("invalid-kind", "kind must be 'regular' or 'singular', got '" + s + "'");
}

double lambda_of(double a, double p, int N, ExponentKind kind) {
  if (kind == ExponentKind::singular) return a * (a * (p - 1.0) + p - N);
  return a * (a * (p - 1.0) + N - p);
}

namespace {

struct AngularRhs {
  double a, p, lambda, c;
  int N;
  // η'' from the weighted flux form
  double operator()(double th, double eta, double d) const {
    const double a2e2 = a * a * eta * eta;
    const double Q = a2e2 + d * d;
    if (Q == 0.0) throw ExponentError("integrator", "η and η' vanish simultaneously");
    double rhs = -lambda * eta - (p - 2.0) * a * a * eta * d * d / Q;
    if (N > 2) rhs -= (N - 2) * std::cos(th) / std::sin(th) * d;
    if (c != 0.0 && eta != 0.0) rhs += c * std::pow(std::abs(eta), p - 2.0) * eta * std::pow(Q, 0.5 * (2.0 - p));
    return rhs * Q / (a2e2 + (p - 1.0) * d * d);
  }
};

void validate(double a, double p, int N, double c, AngularGeometry geometry) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ExponentError("invalid-exponent", "a must be > 0");
  if (!(p > 1.0)) throw ExponentError("invalid-p", "p must be > 1");
  if (!(c >= 0.0)) throw ExponentError("invalid-potential", "c must be >= 0");
  if (geometry == AngularGeometry::axisymmetric_cap && N < 3)
    throw ExponentError("invalid-dimension", "axisymmetric cap needs N >= 3");
  if (geometry == AngularGeometry::planar_sector && N != 2)
    throw ExponentError("invalid-dimension", "planar sector needs N = 2");
}

// Root of the cubic Hermite interpolant on [0, 1] with y0 > 0 ≥ y1.
double hermite_root(double y0, double y1, double m0, double m1) {
  auto H = [&](double t) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (H(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ShotResult angular_shoot(double a, double p, int N, ExponentKind kind, double c, AngularGeometry geometry,
                         bool keep, double step) {
  validate(a, p, N, c, geometry);
  const double lambda = lambda_of(a, p, N, kind);
  AngularRhs f{a, p, lambda, c, N};
  const bool cap = geometry == AngularGeometry::axisymmetric_cap;
  const double limit = cap ? std::numbers::pi : 2.0 * std::numbers::pi;

  ShotResult res;
  AngularProfile& prof = res.profile;
  prof.a = a;
  prof.lambda = lambda;
  prof.p = p;
  prof.N = N;
  prof.c = c;
  prof.kind = kind;
  prof.geometry = geometry;

  double th = 0.0, eta, d;
  auto push = [&](double t, double e, double de) {
    if (!keep) return;
    prof.theta.push_back(t);
    prof.eta.push_back(e);
    prof.deta.push_back(de);
  };
  if (cap) {
    push(0.0, 1.0, 0.0);
    const double e2 = (c * std::pow(a, 2.0 - p) - lambda) / (N - 1);
    th = step;
    eta = 1.0 + 0.5 * e2 * step * step;
    d = e2 * step;
  } else {
    eta = 0.0;
    d = 1.0;
  }
  push(th, eta, d);

  while (th + step < limit) {
    const double h = step;
    double k1e = d, k1d = f(th, eta, d);
    double k2e = d + h / 2 * k1d, k2d = f(th + h / 2, eta + h / 2 * k1e, d + h / 2 * k1d);
    double k3e = d + h / 2 * k2d, k3d = f(th + h / 2, eta + h / 2 * k2e, d + h / 2 * k2d);
    double k4e = d + h * k3d, k4d = f(th + h, eta + h * k3e, d + h * k3d);
    double ne = eta + h / 6 * (k1e + 2 * k2e + 2 * k3e + k4e);
    double nd = d + h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
    if (!std::isfinite(ne) || !std::isfinite(nd)) throw ExponentError("integrator", "non-finite state");
    if (ne <= 0.0 && eta > 0.0) {
      double t = hermite_root(eta, ne, d * h, nd * h);
      res.crossed = true;
      res.theta_star = th + t * h;
      if (keep) {
        // derivative at the zero from the Hermite interpolant
        double t2 = t * t;
        double dz = ((6 * t2 - 6 * t) * eta + (3 * t2 - 4 * t + 1) * d * h + (-6 * t2 + 6 * t) * ne +
                     (3 * t2 - 2 * t) * nd * h) /
                    h;
        if (t * h > 1e-12)
          push(res.theta_star, 0.0, dz);
        else {
          prof.eta.back() = 0.0;
          prof.deta.back() = dz;
        }
        prof.theta0 = res.theta_star;
      }
      return res;
    }
    th += h;
    eta = ne;
    d = nd;
    push(th, eta, d);
  }
  return res;
}

AngularProfile exponent_for_opening(double theta0, double p, int N, ExponentKind kind, double c,
                                    AngularGeometry geometry, double tol) {
  const bool cap = geometry == AngularGeometry::axisymmetric_cap;
  const double limit = cap ? std::numbers::pi : 2.0 * std::numbers::pi;
  if (!(theta0 > 0.0 && theta0 < limit)) throw ExponentError("invalid-opening", "opening outside (0, limit)");
  if (!(tol > 0.0)) throw ExponentError("invalid-tolerance", "tolerance must be positive");
  validate(1.0, p, N, c, geometry);

  auto g = [&](double a) {
    auto s = angular_shoot(a, p, N, kind, c, geometry);
    return s.crossed ? s.theta_star - theta0 : std::numeric_limits<double>::infinity();
  };

  const double amin = 1e-3, amax = 50.0;
  const int n = 64;
  std::vector<double> as(n + 1), gs(n + 1);
  for (int k = 0; k <= n; ++k) {
    as[k] = amin * std::pow(amax / amin, static_cast<double>(k) / n);
    gs[k] = g(as[k]);
  }
  std::vector<std::pair<double, double>> brackets;
  for (int k = 0; k < n; ++k)
    if ((gs[k] > 0.0) != (gs[k + 1] > 0.0)) brackets.emplace_back(as[k], as[k + 1]);
  if (brackets.empty())
    throw ExponentError("range", "no exponent in [1e-3, 50] realizes the requested opening");
  if (brackets.size() > 1) {
    std::ostringstream os;
    os << "theta*(a) crosses the opening " << brackets.size() << " times, near a =";
    for (auto& b : brackets) os << ' ' << b.first << ".." << b.second;
    throw ExponentError("ambiguity", os.str());
  }
  double lo = brackets[0].first, hi = brackets[0].second;
  const bool lo_pos = g(lo) > 0.0;
  // bisection on a; the bracket is tiny so the opening error is far below tol
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((g(mid) > 0.0) == lo_pos)
      lo = mid;
    else
      hi = mid;
  }
  double a = 0.5 * (lo + hi);
  auto shot = angular_shoot(a, p, N, kind, c, geometry, true);
  if (!shot.crossed || std::abs(shot.theta_star - theta0) > std::max(tol, 1e-7))
    throw ExponentError("non-convergence", "bisection did not reach the opening tolerance");
  shot.profile.theta.back() = theta0;
  shot.profile.theta0 = theta0;
  return shot.profile;
}

double AngularProfile::eval(double th) const {
  if (theta.empty()) throw ExponentError("empty-profile", "profile has no samples");
  if (th < 0.0 || th > theta0 + 1e-9) throw ExponentError("domain", "angle outside the profile range");
  th = std::min(th, theta0);
  auto it = std::upper_bound(theta.begin(), theta.end(), th);
  std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - theta.begin() - 1, 0), theta.size() - 2);
  double h = theta[k + 1] - theta[k];
  double t = (th - theta[k]) / h;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * eta[k] + (t3 - 2 * t2 + t) * deta[k] * h + (-2 * t3 + 3 * t2) * eta[k + 1] +
         (t3 - t2) * deta[k + 1] * h;
}

double AngularProfile::derivative(double th) const {
  if (theta.empty()) throw ExponentError("empty-profile", "profile has no samples");
  if (th < 0.0 || th > theta0 + 1e-9) throw ExponentError("domain", "angle outside the profile range");
  th = std::min(th, theta0);
  auto it = std::upper_bound(theta.begin(), theta.end(), th);
  std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - theta.begin() - 1, 0), theta.size() - 2);
  double h = theta[k + 1] - theta[k];
  double t = (th - theta[k]) / h;
  double t2 = t * t;
  return ((6 * t2 - 6 * t) * eta[k] + (3 * t2 - 4 * t + 1) * deta[k] * h + (-6 * t2 + 6 * t) * eta[k + 1] +
          (3 * t2 - 2 * t) * deta[k + 1] * h) /
         h;
}

double AngularProfile::max_eta() const { return eta.empty() ? 0.0 : *std::max_element(eta.begin(), eta.end()); }

ScalarField separable_field(const AngularProfile& profile, std::shared_ptr<const PolarGrid> grid) {
  const PolarGrid& g = *grid;
  if (std::abs(g.theta(0)) > 1e-9 || std::abs(g.theta_extent() - profile.theta0) > 1e-6)
    throw ExponentError("extent-mismatch", "grid angular extent does not match the profile opening");
  const double sgn = profile.kind == ExponentKind::regular ? 1.0 : -1.0;
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    double r = g.r(g.radial_index(k));
    double th = std::min(g.theta(g.angular_index(k)), profile.theta0);
    v[k] = std::max(0.0, std::pow(r, sgn * profile.a) * profile.eval(th));
  }
  return ScalarField(std::move(grid), std::move(v));
}

}  // namespace bhl
