#include "bhl/singular.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bhl/errors.hpp"
#include "bhl/fitting.hpp"

namespace bhl {

double TruncationLadder::V(double r, double theta) const {
  return std::pow(r, -profile.a) * profile.eval(std::clamp(theta, 0.0, profile.theta0));
}

namespace {

double arc_value(const AngularProfile& prof, const LadderOptions& opts, double r, double th) {
  th = std::clamp(th, 0.0, prof.theta0);
  double v = opts.arc_scale * std::pow(r, -prof.a) * prof.eval(th);
  if (opts.arc_shape) v *= opts.arc_shape(th);
  return std::max(v, 0.0);
}

}  // namespace

ScalarField truncated_solve(const DomainSpec& dom, double p, double c, double eps, const AngularProfile& profile,
                            const LadderOptions& opts, const std::vector<double>* warm) {
  if (dom.shape() != Shape::half_disk) throw SingularError("domain", "truncation scheme needs a half-disk");
  if (!(c >= 0.0)) throw SingularError("invalid-potential", "c must be >= 0");
  const std::size_t nr = dyadic_radial_count(eps, dom.radius(), opts.per_octave);
  auto grid = std::make_shared<const PolarGrid>(build_polar_grid(dom, nr, opts.n_theta, eps));
  SolverOptions so = opts.solver;
  so.initial_guess = warm;
  return solve_dirichlet(grid, p, PotentialSpec::inverse_power(c),
                         [&](double r, double th) { return arc_value(profile, opts, r, th); }, so);
}

TruncationLadder build_ladder(double p, double c, const LadderOptions& opts) {
  if (opts.K < 1) throw SingularError("invalid-ladder", "need at least two levels");
  const double oct = std::log2(opts.radius / opts.eps0);
  if (std::abs(oct - std::round(oct)) > 1e-9) throw SingularError("invalid-ladder", "R/eps0 must be a power of two");
  TruncationLadder L;
  L.p = p;
  L.c = c;
  L.opts = opts;
  L.profile = exponent_for_opening(std::numbers::pi, p, 2, ExponentKind::singular, c, AngularGeometry::planar_sector);
  const auto dom = DomainSpec::half_disk(opts.radius);
  for (int k = 0; k <= opts.K; ++k) {
    const double eps = opts.eps0 * std::ldexp(1.0, -k);
    std::vector<double> guess;
    const std::vector<double>* warm = nullptr;
    if (!L.fields.empty()) {
      // previous level on the overlap, the arc data below it
      const auto& prev = L.fields.back();
      const std::size_t nr = dyadic_radial_count(eps, opts.radius, opts.per_octave);
      PolarGrid g = build_polar_grid(dom, nr, opts.n_theta, eps);
      guess.resize(g.size());
      for (std::size_t id = 0; id < g.size(); ++id) {
        double r = g.r(g.radial_index(id)), th = g.theta(g.angular_index(id));
        auto v = prev.at_polar(r, th);
        guess[id] = v ? *v : arc_value(L.profile, opts, r, th);
      }
      warm = &guess;
    }
    L.epsilons.push_back(eps);
    L.fields.push_back(truncated_solve(dom, p, c, eps, L.profile, opts, warm));
  }
  double kb = 0.0;
  for (double th : L.fields.back().grid().angles()) kb = std::max(kb, opts.arc_scale * L.V(opts.radius, th));
  L.K_bar = kb;
  return L;
}

LadderReport analyze_ladder(const TruncationLadder& L) {
  LadderReport rep;
  rep.epsilons = L.epsilons;
  rep.K_bar = L.K_bar;
  const double C = L.opts.slack_C;
  const std::size_t off = L.opts.per_octave;
  rep.monotonicity_min = std::numeric_limits<double>::infinity();
  rep.decreasing_margin_min = std::numeric_limits<double>::infinity();
  const double a_lo = 2.0 * L.opts.eps0, a_hi = 4.0 * L.opts.eps0;
  for (std::size_t k = 0; k + 1 < L.fields.size(); ++k) {
    const auto& u0 = L.fields[k];
    const auto& u1 = L.fields[k + 1];
    const PolarGrid& g0 = u0.grid();
    const PolarGrid& g1 = u1.grid();
    if (g1.n_r() != g0.n_r() + off || g1.n_theta() != g0.n_theta())
      throw SingularError("grid-mismatch", "ladder grids are not nested");
    const double h2rel = g0.relative_resolution_sq();
    double umax = 0.0;
    for (std::size_t id = 0; id < g0.size(); ++id) umax = std::max(umax, std::abs(u0[id]));
    double diff = 0.0, scale = 0.0;
    for (std::size_t id = 0; id < g0.size(); ++id) {
      const std::size_t i = g0.radial_index(id), j = g0.angular_index(id);
      if (std::abs(g1.r(i + off) / g0.r(i) - 1.0) > 1e-12) throw SingularError("grid-mismatch", "radii misaligned");
      const double a = u0[id], b = u1[g1.id(i + off, j)];
      if (g0.tag(id) == NodeTag::interior) {
        const double h = g0.local_spacing(id);
        rep.monotonicity_min = std::min(rep.monotonicity_min, b - a + 1e-8 + C * h * h);
        rep.decreasing_margin_min =
            std::min(rep.decreasing_margin_min, a - b + 1e-8 * umax + C * h2rel * std::max(std::abs(a), std::abs(b)));
      }
      const double r = g0.r(i);
      if (r >= a_lo * (1 - 1e-12) && r <= a_hi * (1 + 1e-12)) {
        diff = std::max(diff, std::abs(b - a));
        scale = std::max(scale, std::abs(b));
      }
    }
    rep.convergence_diffs.push_back(scale > 0.0 ? diff / scale : 0.0);
  }
  for (const auto& u : L.fields) {
    const PolarGrid& g = u.grid();
    const double h2rel = g.relative_resolution_sq();
    for (std::size_t id = 0; id < g.size(); ++id) {
      const double Vn = L.opts.arc_scale * L.V(g.r(g.radial_index(id)), g.theta(g.angular_index(id)));
      const double gap = Vn - u[id];
      const double slack = 1e-8 + C * h2rel * std::abs(Vn);
      rep.sandwich_max = std::max(rep.sandwich_max, gap);
      rep.sandwich_upper_violation = std::max(rep.sandwich_upper_violation, -gap - slack);
      rep.sandwich_lower_violation = std::max(rep.sandwich_lower_violation, gap - L.K_bar - slack);
    }
  }
  // consecutive levels agree to discretization accuracy on the fixed annulus
  const double floor = std::max(1e-4, C * L.fields.front().grid().relative_resolution_sq());
  rep.converged = !rep.convergence_diffs.empty() && rep.convergence_diffs.back() < floor;
  return rep;
}

std::string ladder_json(const LadderReport& rep) {
  nlohmann::ordered_json j;
  j["epsilons"] = rep.epsilons;
  j["monotonicity_min"] = rep.monotonicity_min;
  j["sandwich_max"] = rep.sandwich_max;
  j["convergence_diffs"] = rep.convergence_diffs;
  j["decreasing_margin_min"] = rep.decreasing_margin_min;
  j["sandwich_upper_violation"] = rep.sandwich_upper_violation;
  j["sandwich_lower_violation"] = rep.sandwich_lower_violation;
  j["K_bar"] = rep.K_bar;
  j["converged"] = rep.converged;
  return j.dump(2);
}

ScalarField singular_limit(const TruncationLadder& ladder, LadderReport* report) {
  if (ladder.fields.size() < 4) throw SingularError("invalid-ladder", "need K >= 3");
  LadderReport rep = analyze_ladder(ladder);
  if (report) *report = rep;
  if (rep.decreasing_margin_min < 0.0)
    throw SingularError("scheme-violation", "truncated solutions are not ordered in eps beyond slack");
  return ladder.fields.back();
}

std::vector<BlowupPoint> blowup_rate(const ScalarField& field, const AngularProfile& profile,
                                     const std::vector<double>& radii) {
  if (radii.empty()) return {};
  const auto& angles = field.grid().angles();
  auto scaled = [&](double r) {
    std::vector<double> w;
    for (double th : angles) {
      auto v = field.at_polar(r, th);
      if (!v) throw SingularError("radius-outside-grid", "blow-up radius outside the field grid");
      w.push_back(std::pow(r, profile.a) * *v);
    }
    return w;
  };
  std::vector<double> eta;
  for (double th : angles) eta.push_back(profile.eval(std::min(th, profile.theta0)));
  const double rmin = *std::min_element(radii.begin(), radii.end());
  const auto w0 = scaled(rmin);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    num += w0[j] * eta[j];
    den += eta[j] * eta[j];
  }
  const double kappa = den > 0.0 ? num / den : 0.0;
  const double peak = kappa * *std::max_element(eta.begin(), eta.end());
  std::vector<BlowupPoint> out;
  for (double r : radii) {
    const auto w = scaled(r);
    double dev = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) dev = std::max(dev, std::abs(w[j] - kappa * eta[j]));
    out.push_back({r, dev, peak > 0.0 ? dev / peak : std::numeric_limits<double>::infinity()});
  }
  return out;
}

ConeFit tolksdorff_cone_fit(double opening, double p, double c, const ConeOptions& opts) {
  if (!(opts.R_out >= 64.0)) throw SingularError("invalid-cone", "R_out must be at least 2^6");
  if (!(opts.fit_r_min >= 1.0 && opts.fit_r_max > opts.fit_r_min && opts.fit_r_max <= opts.R_out))
    throw SingularError("invalid-cone", "fit window outside the cone");
  const auto dom = DomainSpec::sector(opening, opts.R_out);
  const std::size_t nr = dyadic_radial_count(1.0, opts.R_out, opts.per_octave);
  auto grid = std::make_shared<const PolarGrid>(build_polar_grid(dom, nr, opts.n_theta, 1.0));
  auto v = solve_dirichlet(grid, p, PotentialSpec::inverse_power(c), [](double, double) { return 1.0; });
  const PolarGrid& g = *grid;
  std::vector<double> rs, ms;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double r = g.r(i);
    if (r < opts.fit_r_min * (1 - 1e-12) || r > opts.fit_r_max * (1 + 1e-12)) continue;
    double m = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j) m = std::max(m, v[g.id(i, j)]);
    rs.push_back(r);
    ms.push_back(m);
  }
  if (rs.size() < 4) throw SingularError("invalid-cone", "too few radii in the fit window");
  ConeFit fit;
  auto lf = fit_loglog(rs, ms);
  fit.beta_hat = -lf.slope;
  fit.rms = lf.rms;
  fit.fit_r_min = rs.front();
  fit.fit_r_max = rs.back();
  fit.iterations = v.log.iterations;
  auto dyadic = [](double r) { return std::abs(std::log2(r) - std::round(std::log2(r))) < 1e-9; };
  for (std::size_t a = 0; a < rs.size(); ++a)
    for (std::size_t b = a + 1; b < rs.size(); ++b)
      if (dyadic(rs[a]) && std::abs(rs[b] / rs[a] - 2.0) < 1e-9) fit.octave_slopes.push_back(-std::log2(ms[b] / ms[a]));
  if (!fit.octave_slopes.empty()) {
    auto [lo, hi] = std::minmax_element(fit.octave_slopes.begin(), fit.octave_slopes.end());
    fit.contamination_advisory = (*hi - *lo) > opts.advisory_spread * std::abs(fit.beta_hat);
  }
  return fit;
}

MoebiusReport moebius_check(const ScalarField& field, double p, double r_in, double r_out) {
  const PolarGrid& g = field.grid();
  if (g.center().norm() != 0.0) throw GeometryError("moebius", "field grid must be centered at the origin");
  if (!(r_in > 0.0 && r_out > r_in)) throw GeometryError("moebius", "need 0 < r_in < r_out");
  const double tol = 1e-12;
  if (r_in < (1.0 / g.outer_radius()) * (1 - tol) || r_out > (1.0 / g.inner_radius()) * (1 + tol))
    throw GeometryError("annulus-exits-grid", "inverted annulus leaves the source grid");
  std::vector<double> radii;
  std::vector<std::size_t> src;
  for (std::size_t i = g.n_r(); i-- > 0;) {
    const double rr = 1.0 / g.r(i);
    if (rr >= r_in * (1 - tol) && rr <= r_out * (1 + tol)) {
      radii.push_back(rr);
      src.push_back(i);
    }
  }
  if (radii.size() < 4) throw GeometryError("moebius", "inverted annulus holds fewer than 4 radii");
  const std::size_t nt = g.n_theta();
  std::vector<NodeTag> tags(radii.size() * nt, NodeTag::interior);
  std::vector<double> vals(tags.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t id = i * nt + j;
      if (j == 0 || j + 1 == nt)
        tags[id] = NodeTag::dirichlet_zero;
      else if (i == 0 || i + 1 == radii.size())
        tags[id] = NodeTag::truncation_arc;
      vals[id] = field[g.id(src[i], j)];
    }
  }
  MoebiusReport rep;
  rep.r_in = radii.front();
  rep.r_out = radii.back();
  rep.nodes = vals.size();
  auto tg = std::make_shared<const PolarGrid>(std::move(radii), g.angles(), std::move(tags), Point{});
  ScalarField inv(tg, std::move(vals));
  rep.residual = weak_residual(inv, p, PotentialSpec::zero());
  return rep;
}

}  // namespace bhl
