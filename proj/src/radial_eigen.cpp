#include <algorithm>
#include <cmath>
#include <limits>

#include "bhl/errors.hpp"
#include "bhl/plaplace.hpp"

namespace bhl {

namespace {

// State (φ, w) with w = s^{N-1}|φ'|^{p-2}φ'.
struct RadialRhs {
  double p, lambda;
  int N;
  double dphi(double s, double w) const {
    double a = std::pow(std::abs(w) * std::pow(s, 1.0 - N), 1.0 / (p - 1.0));
    return w >= 0.0 ? a : -a;
  }
  void operator()(double s, double phi, double w, double& fphi, double& fw) const {
    fphi = dphi(s, w);
    fw = -lambda * std::pow(s, N - 1.0) * std::pow(std::abs(phi), p - 2.0) * phi;
    if (phi == 0.0) fw = 0.0;
  }
};

struct Shot {
  bool crossed = false;  // φ vanished inside (1, 3)
  double end = 0.0;
  std::vector<double> phi, w;
};

Shot shoot(double p, int N, double lambda, std::size_t steps, bool keep) {
  RadialRhs f{p, lambda, N};
  const double h = 2.0 / static_cast<double>(steps);
  double phi = 0.0, w = 1.0;
  Shot out;
  if (keep) {
    out.phi.reserve(steps + 1);
    out.w.reserve(steps + 1);
    out.phi.push_back(phi);
    out.w.push_back(w);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    double s = 1.0 + h * static_cast<double>(k);
    double k1p, k1w, k2p, k2w, k3p, k3w, k4p, k4w;
    f(s, phi, w, k1p, k1w);
    f(s + h / 2, phi + h / 2 * k1p, w + h / 2 * k1w, k2p, k2w);
    f(s + h / 2, phi + h / 2 * k2p, w + h / 2 * k2w, k3p, k3w);
    f(s + h, phi + h * k3p, w + h * k3w, k4p, k4w);
    phi += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    if (keep) {
      out.phi.push_back(phi);
      out.w.push_back(w);
    }
    if (phi <= 0.0 && k + 1 < steps) {
      out.crossed = true;
      if (!keep) return out;
    }
  }
  out.end = phi;
  return out;
}

}  // namespace

RadialEigenpair eigen_annulus_radial(double p, int N, std::size_t steps) {
  if (!(p > 1.0)) throw SolverError("invalid-exponent", "p must be > 1");
  if (N < 1) throw SolverError("invalid-dimension", "dimension must be >= 1");
  if (steps < 100 || steps % 2 != 0) throw SolverError("invalid-grid", "step count must be even and >= 100");
  double lo = 0.0, hi = 1.0;
  while (!shoot(p, N, hi, steps, false).crossed) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw SolverError("non-convergence", "no eigenvalue bracket");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    Shot s = shoot(p, N, mid, steps, false);
    if (s.crossed || s.end <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  RadialEigenpair ep;
  ep.lambda1 = 0.5 * (lo + hi);
  ep.p = p;
  ep.N = N;
  Shot s = shoot(p, N, ep.lambda1, steps, true);
  RadialRhs f{p, ep.lambda1, N};
  const double h = 2.0 / static_cast<double>(steps);
  const double norm = s.phi[steps / 2];
  ep.s.resize(steps + 1);
  ep.phi.resize(steps + 1);
  ep.dphi.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    ep.s[k] = 1.0 + h * static_cast<double>(k);
    ep.phi[k] = std::max(s.phi[k], 0.0) / norm;
    ep.dphi[k] = f.dphi(ep.s[k], s.w[k]) / norm;
  }
  ep.phi.front() = 0.0;
  ep.phi.back() = 0.0;
  return ep;
}

namespace {
// cubic Hermite on uniform samples
double hermite(const RadialEigenpair& e, double s, bool deriv) {
  if (s < e.s.front() || s > e.s.back()) throw SolverError("domain", "profile evaluated outside [1, 3]");
  const double h = e.s[1] - e.s[0];
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>((s - e.s.front()) / h), e.s.size() - 2);
  double t = (s - e.s[k]) / h;
  double y0 = e.phi[k], y1 = e.phi[k + 1], m0 = e.dphi[k] * h, m1 = e.dphi[k + 1] * h;
  if (!deriv) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  }
  double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
}
}  // namespace

double RadialEigenpair::value(double x) const { return hermite(*this, x, false); }
double RadialEigenpair::derivative(double x) const { return hermite(*this, x, true); }

SideReport side_condition_check_radial(const std::vector<double>& s, const std::vector<double>& values, double p,
                                       int N, double kappa, Side side) {
  if (s.size() != values.size() || s.size() < 3) throw SolverError("invalid-grid", "radial samples mismatch");
  SideReport rep;
  auto flux = [&](std::size_t k) {  // at s_{k+1/2}
    double sm = 0.5 * (s[k] + s[k + 1]);
    double d = (values[k + 1] - values[k]) / (s[k + 1] - s[k]);
    double a = std::abs(d);
    double f = a == 0.0 ? 0.0 : std::pow(a, p - 2.0) * d;
    return std::pow(sm, N - 1.0) * f;
  };
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    double h = 0.5 * (s[k + 1] - s[k - 1]);
    double v = values[k];
    double op = -(flux(k) - flux(k - 1)) / (std::pow(s[k], N - 1.0) * h) +
                kappa * (v == 0.0 ? 0.0 : std::pow(std::abs(v), p - 2.0) * v);
    ++rep.tested;
    double viol = side == Side::subsolution ? op : -op;
    if (viol > 0.0) {
      rep.failures.push_back({k, op});
      rep.worst = std::max(rep.worst, viol);
    }
  }
  return rep;
}

}  // namespace bhl
