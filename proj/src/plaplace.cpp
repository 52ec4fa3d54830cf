#include "bhl/plaplace.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bhl/errors.hpp"

namespace bhl {

PotentialSpec PotentialSpec::inverse_power(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw SolverError("invalid-potential", "potential constant c must be >= 0");
  PotentialSpec s;
  s.form = c == 0.0 ? Form::zero : Form::inverse_power;
  s.c = c;
  s.C0 = c;
  return s;
}

double PotentialSpec::d(Point x, double p) const {
  if (form == Form::zero) return 0.0;
  return -c * std::pow(x.norm(), -p);
}

bool PotentialSpec::satisfies_bound(const std::vector<Point>& samples, double p) const {
  for (const auto& x : samples) {
    double r = x.norm();
    if (r == 0.0) continue;
    if (std::abs(d(x, p)) > C0 * std::pow(r, -p) * (1.0 + 1e-12)) return false;
  }
  return true;
}

std::optional<double> ScalarField::at(Point x) const {
  Point rel = x - grid_->center();
  double r = rel.norm();
  double th = r == 0.0 ? 0.0 : rel.angle();
  return grid_->interpolate(values_, r, th);
}

ScalarField ScalarField::scaled(double k) const {
  ScalarField out(grid_, values_);
  for (auto& v : out.values_) v *= k;
  out.log = log;
  out.log.regularization_floor *= std::abs(k);
  return out;
}

ScalarField sample_field(std::shared_ptr<const PolarGrid> grid, const std::function<double(Point)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid->node_point(k));
  return ScalarField(std::move(grid), std::move(v));
}

namespace {

// Convex discrete energy
//   E(u) = Σ_cells Σ_corners w [ (|g|² + ε²)^{p/2}/p + κ_cell (u² + δ²)^{p/2}/p ]
// with w a quarter of the exact cell area and g the corner gradient built from
// the radial difference on the corner's θ-edge and the angular difference on
// its r-edge. Its gradient is the weak residual against nodal hat functions.
class Discretization {
 public:
  Discretization(const PolarGrid& g, double p) : g_(g), p_(p) {
    const std::size_t nr = g.n_r(), nt = g.n_theta();
    cell_w_.assign((nr - 1) * (nt - 1), 0.0);
    cell_x_.assign(cell_w_.size(), Point{});
    V_.assign(g.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      for (std::size_t j = 0; j + 1 < nt; ++j) {
        double dth = g.theta(j + 1) - g.theta(j);
        double A = 0.5 * (g.r(i + 1) * g.r(i + 1) - g.r(i) * g.r(i)) * dth;
        std::size_t c = cell(i, j);
        cell_w_[c] = A / 4.0;
        cell_x_[c] = g.center() + polar_point(0.5 * (g.r(i) + g.r(i + 1)), 0.5 * (g.theta(j) + g.theta(j + 1)));
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) V_[g.id(i + a, j + b)] += A / 4.0;
      }
    }
  }

  std::size_t cell(std::size_t i, std::size_t j) const { return i * (g_.n_theta() - 1) + j; }
  std::size_t n_cells() const { return cell_w_.size(); }
  const std::vector<double>& V() const { return V_; }

  // Potential coefficient per cell: c|x_c|^{-p} for the physical equation.
  std::vector<double> potential_coeffs(const PotentialSpec& pot) const {
    std::vector<double> k(n_cells(), 0.0);
    if (pot.strength() == 0.0) return k;
    for (std::size_t c = 0; c < k.size(); ++c) k[c] = -pot.d(cell_x_[c], p_);
    return k;
  }

  struct Eval {
    std::vector<double> R;     // full residual, all nodes
    std::vector<double> flux;  // gradient part
    std::vector<double> gmax;  // largest corner gradient in adjacent cells
    double energy = 0.0;
  };

  enum class Mat { none, newton, frozen };

  Eval evaluate(const std::vector<double>& u, double eps2, double delta2, const std::vector<double>& kappa,
                Mat mat = Mat::none, std::vector<Eigen::Triplet<double>>* trip = nullptr,
                const std::vector<int>* unk = nullptr) const {
    const std::size_t nr = g_.n_r(), nt = g_.n_theta();
    Eval e;
    e.R.assign(g_.size(), 0.0);
    e.flux.assign(g_.size(), 0.0);
    e.gmax.assign(g_.size(), 0.0);
    const double p = p_;
    for (std::size_t i = 0; i + 1 < nr; ++i) {
      const double h = g_.r(i + 1) - g_.r(i);
      for (std::size_t j = 0; j + 1 < nt; ++j) {
        const double dth = g_.theta(j + 1) - g_.theta(j);
        const std::size_t c = cell(i, j);
        const double w = cell_w_[c];
        const double kap = kappa[c];
        const std::size_t n[4] = {g_.id(i, j), g_.id(i + 1, j), g_.id(i, j + 1), g_.id(i + 1, j + 1)};
        double H[4][4] = {};
        double cellg = 0.0;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            // G is 2x4: rows (radial, angular), columns local nodes a + 2b
            double G[2][4] = {};
            G[0][1 + 2 * b] = 1.0 / h;
            G[0][0 + 2 * b] = -1.0 / h;
            const double ra = g_.r(i + a) * dth;
            G[1][a + 2] = 1.0 / ra;
            G[1][a] = -1.0 / ra;
            double gv[2] = {0.0, 0.0};
            for (int r = 0; r < 2; ++r)
              for (int l = 0; l < 4; ++l) gv[r] += G[r][l] * u[n[l]];
            const double t = gv[0] * gv[0] + gv[1] * gv[1];
            cellg = std::max(cellg, std::sqrt(t));
            const double s = t + eps2;
            double coef = 0.0;
            const bool smooth = s > 0.0 || p >= 2.0;
            if (smooth) {
              coef = std::pow(s, 0.5 * (p - 2.0));
              e.energy += w * std::pow(s, 0.5 * p) / p;
            }
            for (int l = 0; l < 4; ++l) {
              double f = w * coef * (G[0][l] * gv[0] + G[1][l] * gv[1]);
              e.R[n[l]] += f;
              e.flux[n[l]] += f;
            }
            // potential, lumped at the corner node
            const int lc = a + 2 * b;
            const double uc = u[n[lc]];
            const double q = uc * uc + delta2;
            double dP = 0.0, d2P = 0.0, pic = 0.0;
            if (kap != 0.0 && q > 0.0) {
              pic = std::pow(q, 0.5 * (p - 2.0));
              dP = uc * pic;
              d2P = std::pow(q, 0.5 * (p - 4.0)) * ((p - 1.0) * uc * uc + delta2);
              e.energy += w * kap * std::pow(q, 0.5 * p) / p;
            }
            e.R[n[lc]] += w * kap * dP;
            if (mat != Mat::none && smooth) {
              double M[2][2] = {{coef, 0.0}, {0.0, coef}};
              if (mat == Mat::newton) {
                const double fac = s > 0.0 ? coef * (p - 2.0) / s : 0.0;
                for (int r = 0; r < 2; ++r)
                  for (int q2 = 0; q2 < 2; ++q2) M[r][q2] += fac * gv[r] * gv[q2];
              }
              for (int l = 0; l < 4; ++l) {
                for (int m = 0; m < 4; ++m) {
                  double acc = 0.0;
                  for (int r = 0; r < 2; ++r)
                    for (int q2 = 0; q2 < 2; ++q2) acc += G[r][l] * M[r][q2] * G[q2][m];
                  H[l][m] += w * acc;
                }
              }
            }
            if (mat != Mat::none) H[lc][lc] += w * kap * (mat == Mat::newton ? d2P : pic);
          }
        }
        for (int l = 0; l < 4; ++l) e.gmax[n[l]] = std::max(e.gmax[n[l]], cellg);
        if (trip) {
          for (int l = 0; l < 4; ++l) {
            int il = (*unk)[n[l]];
            if (il < 0) continue;
            for (int m = 0; m < 4; ++m) {
              int im = (*unk)[n[m]];
              if (im < 0) continue;
              trip->emplace_back(il, im, H[l][m]);
            }
          }
        }
      }
    }
    return e;
  }

  // |R_i| / ((V_i/r_i)(G_i² + ε²)^{(p-1)/2} + |potential part|), max over interior.
  double scaled_residual(const Eval& e, double eps2) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < g_.size(); ++k) {
      if (g_.tag(k) != NodeTag::interior) continue;
      const double ri = g_.r(g_.radial_index(k));
      const double pot = std::abs(e.R[k] - e.flux[k]);
      const double scale = V_[k] / ri * std::pow(e.gmax[k] * e.gmax[k] + eps2, 0.5 * (p_ - 1.0)) + pot;
      const double num = std::abs(e.R[k]);
      if (num == 0.0) continue;
      if (scale == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, num / scale);
    }
    return worst;
  }

  double merit(const Eval& e) const {
    double s = 0.0;
    for (std::size_t k = 0; k < g_.size(); ++k) {
      if (g_.tag(k) != NodeTag::interior) continue;
      const double v = e.R[k] * g_.r(g_.radial_index(k)) / V_[k];
      s += v * v;
    }
    return std::sqrt(s);
  }

 private:
  const PolarGrid& g_;
  double p_;
  std::vector<double> cell_w_;
  std::vector<Point> cell_x_;
  std::vector<double> V_;
};

void validate_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw SolverError("invalid-exponent", "p must be > 1");
}

}  // namespace

ScalarField solve_dirichlet(std::shared_ptr<const PolarGrid> grid, double p, const PotentialSpec& pot,
                            const ArcData& arc_data, const SolverOptions& opts) {
  validate_p(p);
  if (!grid) throw SolverError("invalid-grid", "null grid");
  if (!(opts.tol > 0.0)) throw SolverError("invalid-tolerance", "tolerance must be positive");
  if (opts.regularization.empty()) throw SolverError("invalid-tolerance", "empty regularization schedule");
  const PolarGrid& g = *grid;

  std::vector<double> u(g.size(), 0.0);
  double maxdata = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.tag(k) != NodeTag::truncation_arc) continue;
    double v = arc_data(g.r(g.radial_index(k)), g.theta(g.angular_index(k)));
    if (!std::isfinite(v) || v < 0.0) throw SolverError("invalid-data", "arc data must be finite and nonnegative");
    u[k] = v;
    maxdata = std::max(maxdata, v);
  }
  ScalarField out(grid, u);
  out.log.p = p;
  out.log.potential_c = pot.strength();
  if (maxdata == 0.0) return out;  // zero data, zero solution

  std::vector<int> unk(g.size(), -1);
  int nunk = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.tag(k) == NodeTag::interior) unk[k] = nunk++;
  if (nunk == 0) return out;

  Discretization D(g, p);
  const auto kappa = D.potential_coeffs(pot);

  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(D.n_cells() * 16);

  auto solve_step = [&](const Discretization& Dx, double eps2, double delta2, Discretization::Mat mat,
                        const Discretization::Eval& cur, Eigen::VectorXd& step) {
    trip.clear();
    Dx.evaluate(u, eps2, delta2, kappa, mat, &trip, &unk);
    SpMat H(nunk, nunk);
    H.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      ldlt.analyzePattern(H);
      analyzed = true;
    }
    ldlt.factorize(H);
    if (ldlt.info() != Eigen::Success) throw SolverError("singular-system", "factorization failed");
    Eigen::VectorXd rhs(nunk);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (unk[k] >= 0) rhs[unk[k]] = -cur.R[k];
    step = ldlt.solve(rhs);
  };

  if (opts.initial_guess) {
    if (opts.initial_guess->size() != g.size()) throw SolverError("invalid-data", "initial guess size mismatch");
    for (std::size_t k = 0; k < g.size(); ++k)
      if (unk[k] >= 0) u[k] = (*opts.initial_guess)[k];
  } else {
    // harmonic start: one exact step of the p = 2 problem
    Discretization D2(g, 2.0);
    auto e0 = D2.evaluate(u, 0.0, 0.0, kappa);
    Eigen::VectorXd step;
    solve_step(D2, 0.0, 0.0, Discretization::Mat::newton, e0, step);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (unk[k] >= 0) u[k] += step[unk[k]];
    analyzed = false;  // pattern is identical, but keep the p-problem separate
  }

  const double R_out = g.outer_radius();
  int iterations = 0;
  double res = std::numeric_limits<double>::infinity();
  double eps2 = 0.0;
  for (std::size_t stage = 0; stage < opts.regularization.size(); ++stage) {
    const double rel = opts.regularization[stage];
    const double eps_abs = rel * maxdata / R_out;
    eps2 = eps_abs * eps_abs;
    const double delta2 = (rel * maxdata) * (rel * maxdata);
    const bool last = stage + 1 == opts.regularization.size();
    const double stage_tol = last ? opts.tol : std::max(opts.tol, 1e-4);
    out.log.regularization_floor = eps_abs;
    auto cur = D.evaluate(u, eps2, delta2, kappa);
    res = D.scaled_residual(cur, eps2);
    while (res > stage_tol) {
      if (iterations >= opts.max_iterations)
        throw SolverError("non-convergence", "Newton iteration budget exhausted", res);
      ++iterations;
      Eigen::VectorXd step;
      solve_step(D, eps2, delta2, Discretization::Mat::newton, cur, step);
      double slope = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (unk[k] >= 0) slope += cur.R[k] * step[unk[k]];
      const double m0 = D.merit(cur);
      double t = 1.0;
      std::vector<double> trial(u);
      Discretization::Eval next;
      for (;;) {
        for (std::size_t k = 0; k < g.size(); ++k)
          if (unk[k] >= 0) trial[k] = u[k] + t * step[unk[k]];
        next = D.evaluate(trial, eps2, delta2, kappa);
        bool armijo = next.energy <= cur.energy + 1e-4 * t * slope;
        if (armijo || D.merit(next) < m0 || t <= 1.0 / 64.0) break;
        t *= 0.5;
      }
      u.swap(trial);
      cur = std::move(next);
      double prev = res;
      res = D.scaled_residual(cur, eps2);
      if (!std::isfinite(res)) throw SolverError("non-convergence", "residual is not finite", prev);
    }
  }

  for (auto& v : u)
    if (v < 0.0) v = 0.0;
  out.values() = std::move(u);
  out.log.iterations = iterations;
  out.log.final_residual = res;
  return out;
}

double weak_residual(const ScalarField& field, double p, const PotentialSpec& pot) {
  validate_p(p);
  const PolarGrid& g = field.grid();
  Discretization D(g, p);
  const double eps = field.log.regularization_floor;
  const double delta = eps * g.outer_radius();
  auto e = D.evaluate(field.values(), eps * eps, delta * delta, D.potential_coeffs(pot));
  return D.scaled_residual(e, eps * eps);
}

std::vector<double> apply_operator(const ScalarField& field, double p, double kappa) {
  validate_p(p);
  const PolarGrid& g = field.grid();
  Discretization D(g, p);
  std::vector<double> kap(D.n_cells(), kappa);
  auto e = D.evaluate(field.values(), 0.0, 0.0, kap);
  std::vector<double> out(g.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.tag(k) == NodeTag::interior) out[k] = e.R[k] / D.V()[k];
  return out;
}

SideReport side_condition_check(const ScalarField& field, double p, double kappa, Side side,
                                const std::function<bool(std::size_t)>& region) {
  auto op = apply_operator(field, p, kappa);
  SideReport rep;
  const PolarGrid& g = field.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.tag(k) != NodeTag::interior) continue;
    if (region && !region(k)) continue;
    ++rep.tested;
    double viol = side == Side::subsolution ? op[k] : -op[k];
    if (viol > 0.0) {
      rep.failures.push_back({k, op[k]});
      rep.worst = std::max(rep.worst, viol);
    }
  }
  return rep;
}

ComparisonReport comparison_check(const ScalarField& u1, const ScalarField& u2, double slack_constant) {
  const PolarGrid& g = u1.grid();
  const PolarGrid& g2 = u2.grid();
  if (g.size() != g2.size() || g.radii() != g2.radii() || g.angles() != g2.angles())
    throw SolverError("precondition", "comparison requires fields on the same grid");
  double scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) scale = std::max({scale, std::abs(u1[k]), std::abs(u2[k])});
  const double tiny = 1e-12 * std::max(scale, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.tag(k) == NodeTag::truncation_arc && u1[k] < u2[k] - tiny)
      throw SolverError("precondition", "boundary data are not ordered");
    if (g.tag(k) == NodeTag::dirichlet_zero && (std::abs(u1[k]) > tiny || std::abs(u2[k]) > tiny))
      throw SolverError("precondition", "fields do not vanish on the Dirichlet boundary");
  }
  const double h2 = g.relative_resolution_sq();
  ComparisonReport rep;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.tag(k) != NodeTag::interior) continue;
    double viol = u2[k] - u1[k];
    if (viol <= 0.0) continue;
    double slack = 1e-8 * scale + slack_constant * h2 * std::max(u1[k], u2[k]);
    double ratio = slack > 0.0 ? viol / slack : std::numeric_limits<double>::infinity();
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.worst_node = k;
    }
    rep.max_violation_ratio = std::max(rep.max_violation_ratio, ratio);
    if (ratio > 1.0) rep.ordered = false;
  }
  return rep;
}

}  // namespace bhl
