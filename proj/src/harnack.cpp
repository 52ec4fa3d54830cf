#include "bhl/harnack.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bhl/errors.hpp"
#include "bhl/fitting.hpp"

namespace bhl {

namespace {

constexpr double kTiny = 1e-14;

const DomainSpec& domain_of(const ScalarField& u) {
  if (!u.grid().domain()) throw VerifierError("no-domain", "field grid carries no domain");
  return *u.grid().domain();
}

std::optional<double> value_at(const ScalarField& u, const DomainSpec& dom, Point x) {
  if (!dom.contains(x)) return std::nullopt;
  return u.at(x);
}

std::vector<Point> disk_samples(Point c, double radius, int nr = 12, int nt = 48) {
  std::vector<Point> pts{c};
  for (int i = 1; i <= nr; ++i)
    for (int j = 0; j < nt; ++j)
      pts.push_back(c + polar_point(radius * i / nr, 2.0 * std::numbers::pi * j / nt));
  return pts;
}

void same_grid(const ScalarField& a, const ScalarField& b) {
  const auto& g = a.grid();
  const auto& h = b.grid();
  if (g.radii() != h.radii() || g.angles() != h.angles())
    throw VerifierError("incompatible-grids", "fields live on different grids");
}

double ratio_spread(const std::vector<double>& q) {
  if (q.empty()) throw VerifierError("sampling", "no usable samples");
  auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  return *hi / *lo;
}

}  // namespace

void HarnackReport::add(std::string id, double r, double constant, std::vector<double> radii, std::string grid_id,
                        int level) {
  records.push_back({std::move(id), r, constant, std::move(radii), std::move(grid_id), level});
}

std::vector<HarnackRecord> HarnackReport::find(const std::string& id) const {
  std::vector<HarnackRecord> out;
  for (const auto& r : records)
    if (r.estimate_id == id) out.push_back(r);
  return out;
}

std::string HarnackReport::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json e;
    e["estimate_id"] = r.estimate_id;
    e["r"] = r.r;
    e["constant"] = r.constant;
    e["radii"] = r.radii;
    e["grid_id"] = r.grid_id;
    e["level"] = r.level;
    recs.push_back(e);
  }
  j["records"] = recs;
  j["excluded"] = excluded;
  return j.dump(2);
}

std::string HarnackReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "estimate_id,r,constant\n";
  for (const auto& r : records) os << r.estimate_id << ',' << r.r << ',' << r.constant << '\n';
  return os.str();
}

double interior_harnack(const ScalarField& u, Point P, double r) {
  const auto& dom = domain_of(u);
  if (!(r > 0.0)) throw VerifierError("precondition", "radius must be positive");
  if (P.norm() < 4.0 * r) throw VerifierError("precondition", "need |P| >= 4r");
  if (!dom.contains(P) || distance_to_boundary(dom, P) < 2.0 * r)
    throw GeometryError("ball-exits-domain", "B_2r(P) is not inside the domain");
  std::vector<double> vals;
  for (Point x : disk_samples(P, r)) {
    auto v = value_at(u, dom, x);
    if (!v) throw GeometryError("ball-exits-domain", "ball leaves the field grid");
    vals.push_back(*v);
  }
  auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  if (*lo < kTiny) throw VerifierError("degenerate-field", "field vanishes inside the ball");
  return *hi / *lo;
}

double chained_harnack(const ScalarField& u, Point Q, double r, int h) {
  const auto& dom = domain_of(u);
  if (h < 1) throw VerifierError("precondition", "h must be >= 1");
  const double rho_min = r / std::ldexp(1.0, h);
  std::vector<double> vals;
  for (Point x : disk_samples(Q, 1.5 * r, 24, 96)) {
    if (!dom.contains(x) || distance_to_boundary(dom, x) < rho_min) continue;
    auto v = u.at(x);
    if (v && *v > kTiny) vals.push_back(*v);
  }
  if (vals.empty()) throw VerifierError("sampling", "no admissible sample points");
  return std::pow(ratio_spread(vals), 1.0 / h);
}

DecayFit boundary_decay(const ScalarField& u, Point P, double s) {
  const auto& dom = domain_of(u);
  if (P.norm() == 0.0) throw VerifierError("precondition", "P must differ from the singular point");
  const Point nu = dom.outward_normal(P);
  std::vector<double> ts, vs;
  for (int k = 0; k < 12; ++k) {
    const double t = s * std::ldexp(1.0, -k);
    auto v = value_at(u, dom, P - t * nu);
    if (v && *v > kTiny) {
      ts.push_back(t);
      vs.push_back(*v);
    }
  }
  if (ts.size() < 4) throw VerifierError("sampling", "fewer than 4 usable normal samples");
  DecayFit f;
  f.delta = fit_loglog(ts, vs).slope;
  f.samples = ts.size();
  double M = 0.0;
  for (Point x : disk_samples(P, s)) {
    auto v = value_at(u, dom, x);
    if (v) M = std::max(M, *v);
  }
  for (std::size_t k = 0; k < ts.size(); ++k) f.c3 = std::max(f.c3, vs[k] / (std::pow(ts[k] / s, f.delta) * M));
  return f;
}

double carleson_constant(const ScalarField& u, Point Q, double r) {
  const auto& dom = domain_of(u);
  const Point A = normal_point(dom, Q, r / 2.0, NormalSide::inward);
  auto uA = value_at(u, dom, A);
  if (!uA || *uA < kTiny) throw VerifierError("degenerate-field", "u(A_{r/2}(Q)) vanishes or is off-grid");
  double M = 0.0;
  for (Point x : disk_samples(Q, r)) {
    auto v = value_at(u, dom, x);
    if (v) M = std::max(M, *v);
  }
  return M / *uA;
}

double two_sided_slope(const ScalarField& u, Point Q, double r, double b) {
  const auto& dom = domain_of(u);
  const Point nu = dom.outward_normal(Q);
  const Point tau{-nu.y, nu.x};
  auto uref = value_at(u, dom, normal_point(dom, Q, r / 2.0, NormalSide::inward));
  if (!uref || *uref < kTiny) throw VerifierError("degenerate-field", "u(N_{r/2}(Q)) vanishes");
  double c6 = 0.0;
  bool any = false;
  for (int k = -8; k <= 8; ++k) {
    const Point P = dom.nearest_boundary_point(Q + (r * k / 9.0) * tau);
    if (distance(P, Q) >= r) continue;
    for (int m = 0; m < 6; ++m) {
      const double t = 0.5 * r * b * std::ldexp(1.0, -m);
      auto v = value_at(u, dom, normal_point(dom, P, t, NormalSide::inward));
      if (!v || *v < kTiny) continue;
      const double R = *v / *uref;
      c6 = std::max({c6, R / (t / r), (t / r) / R});
      any = true;
    }
  }
  if (!any) throw VerifierError("sampling", "no admissible (P, t) samples");
  return c6;
}

AprioriFit apriori_alpha(const ScalarField& u, Point A) {
  const auto& dom = domain_of(u);
  const auto R0 = dom.sphere_radius();
  if (!dom.contains(A) || (R0 && distance_to_boundary(dom, A) < *R0 * (1 - 1e-12)))
    throw VerifierError("precondition", "need rho(A) >= R0");
  auto uA = value_at(u, dom, A);
  if (!uA || *uA < kTiny) throw VerifierError("degenerate-field", "u(A) vanishes");
  const PolarGrid& g = u.grid();
  const double R = dom.radius();
  AprioriFit fit;
  std::vector<double> rs, ups, lows;
  for (int k = 1;; ++k) {
    const double hi = R * std::ldexp(1.0, -k), lo = hi / 2.0;
    if (lo < 2.0 * g.inner_radius() * (1 - 1e-12)) break;
    double qmax = 0.0, qmin = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < g.size(); ++id) {
      if (g.tag(id) != NodeTag::interior) continue;
      const double r = g.r(g.radial_index(id));
      if (r < lo * (1 - 1e-12) || r > hi * (1 + 1e-12)) continue;
      const Point x = g.node_point(id);
      const double rho = distance_to_boundary(dom, x);
      if (rho <= 0.0 || u[id] < kTiny) continue;
      const double q = u[id] / (rho * *uA);
      qmax = std::max(qmax, q);
      qmin = std::min(qmin, q);
    }
    if (qmax == 0.0) continue;
    rs.push_back(std::sqrt(lo * hi));
    ups.push_back(qmax);
    lows.push_back(qmin);
  }
  if (rs.size() < 3) throw VerifierError("sampling", "fewer than 3 annuli");
  auto fu = fit_loglog(rs, ups);
  auto fl = fit_loglog(rs, lows);
  fit.slope_upper = fu.slope;
  fit.slope_lower = fl.slope;
  fit.c_upper = std::exp(fu.intercept);
  fit.c_lower = std::exp(fl.intercept);
  fit.alpha = std::max(fl.slope + 1.0, -fu.slope - 1.0);
  fit.radii = rs;
  return fit;
}

UniformityRatio ratio_uniformity(const ScalarField& u, double r) {
  const auto& dom = domain_of(u);
  const auto R0 = dom.sphere_radius();
  if (!R0 || r > *R0 / 2.0 * (1 + 1e-12)) throw VerifierError("precondition", "need r <= R0/2");
  const PolarGrid& g = u.grid();
  std::vector<double> q;
  double umax = 0.0;
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (g.tag(id) != NodeTag::interior) continue;
    const Point x = g.node_point(id);
    const double rx = x.norm();
    if (rx < r / 2.0 * (1 - 1e-12) || rx > 2.0 * r * (1 + 1e-12)) continue;
    const double rho = distance_to_boundary(dom, x);
    umax = std::max(umax, u[id]);
    if (rho <= 0.0 || u[id] < kTiny) continue;
    q.push_back(u[id] / rho);
  }
  UniformityRatio out;
  out.c9 = ratio_spread(q);
  auto ref = value_at(u, dom, normal_point(dom, Point{0.0, 0.0}, r, NormalSide::inward));
  if (!ref || *ref < kTiny) throw VerifierError("degenerate-field", "u(N_r(0)) vanishes");
  out.c9_vertical = umax / *ref;
  return out;
}

namespace {
double ratio_over(const ScalarField& u1, const ScalarField& u2, const std::function<bool(Point)>& keep,
                  std::size_t* excluded) {
  same_grid(u1, u2);
  const PolarGrid& g = u1.grid();
  std::vector<double> q;
  std::size_t dropped = 0;
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (g.tag(id) != NodeTag::interior) continue;
    if (!keep(g.node_point(id))) continue;
    if (u1[id] < kTiny || u2[id] < kTiny) {
      ++dropped;
      continue;
    }
    q.push_back(u1[id] / u2[id]);
  }
  if (excluded) *excluded += dropped;
  return ratio_spread(q);
}
}  // namespace

double boundary_harnack(const ScalarField& u1, const ScalarField& u2, Point Q, double r, std::size_t* excluded) {
  return ratio_over(u1, u2, [&](Point x) { return distance(x, Q) <= r; }, excluded);
}

double boundary_harnack_annulus(const ScalarField& u1, const ScalarField& u2, double r, std::size_t* excluded) {
  return ratio_over(
      u1, u2,
      [&](Point x) {
        const double n = x.norm();
        return n >= r / 2.0 * (1 - 1e-12) && n <= r * (1 + 1e-12);
      },
      excluded);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::singular: return "singular";
    case Verdict::bounded: return "bounded";
    default: return "inconclusive";
  }
}

SingularityResult singularity_test(const ScalarField& u) {
  const auto& dom = domain_of(u);
  const PolarGrid& g = u.grid();
  SingularityResult res;
  const double eps = g.inner_radius();
  for (int k = 1;; ++k) {
    const double r = g.outer_radius() * std::ldexp(1.0, -k);
    if (r < eps * (1 - 1e-9)) break;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < g.n_theta(); ++j) {
      const double th = g.theta(j);
      const Point x = g.center() + polar_point(r, th);
      const double rho = distance_to_boundary(dom, x);
      auto v = u.at_polar(std::max(r, eps), th);
      if (!v || rho <= 0.0) continue;
      m = std::min(m, x.norm() * *v / rho);
    }
    if (!std::isfinite(m)) continue;
    res.radii.push_back(r);
    res.m.push_back(m);
  }
  if (res.m.size() < 4) return res;
  const std::size_t n = res.m.size();
  bool singular = true, bounded = true;
  for (std::size_t k = n - 3; k < n; ++k) {
    const double q = res.m[k] / res.m[k - 1];
    res.ratios.push_back(q);
    if (!(q >= 1.5)) singular = false;
    if (!(q <= 1.1)) bounded = false;
  }
  res.verdict = singular ? Verdict::singular : bounded ? Verdict::bounded : Verdict::inconclusive;
  return res;
}

QuotientResult quotient_constancy(const ScalarField& u, const ScalarField& v, double r0, double r_min) {
  same_grid(u, v);
  const PolarGrid& g = u.grid();
  std::vector<double> q;
  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (g.tag(id) != NodeTag::interior) continue;
    const double r = g.node_point(id).norm();
    if (r > r0 * (1 + 1e-12) || r < r_min * (1 - 1e-12)) continue;
    if (u[id] < kTiny || v[id] < kTiny) continue;
    q.push_back(v[id] / u[id]);
  }
  if (q.empty()) throw VerifierError("sampling", "no positive nodes in the region");
  QuotientResult out;
  out.nodes = q.size();
  std::vector<double> s = q;
  std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
  out.k = s[s.size() / 2];
  for (double x : q) out.deviation = std::max(out.deviation, std::abs(x / out.k - 1.0));
  return out;
}

}  // namespace bhl
