#pragma once

#include <string>
#include <vector>

#include "bhl/geometry.hpp"
#include "bhl/plaplace.hpp"

namespace bhl {

/// Exponential comparison function V(|x - center|) on the annulus r/4 ≤ s ≤ r/2.
struct LowerBarrierParams {
  double p = 2.0;
  int N = 2;
  double C0t = 0.0;  // effective potential bound after normalizing |Q| = 1
  double a = 0.0;
  double alpha = 2.0;  // p/(p-1)
  double r = 1.0;
  Point center;
};

/// Least a with a^{p-1}(ap/4^α - N) ≥ C̃0.
LowerBarrierParams lower_barrier_params(double p, int N, double C0t, double r = 1.0, Point center = {});
/// a^{p-1}(ap/4^α - N) - C̃0, zero at the minimal a.
double lower_barrier_slack(const LowerBarrierParams& lp);
double lower_barrier_profile(const LowerBarrierParams& lp, double s);
double eval_lower_barrier(const LowerBarrierParams& lp, Point x);
/// Fitted C' with V(N_t(P)) ≥ C' t/r on sampled t in (0, r/2].
double lower_barrier_slope(const LowerBarrierParams& lp, std::size_t samples = 256);

/// Rescaled annulus eigenfunction scale·φ₁(|x - center|/(rb)).
struct UpperBarrierParams {
  double p = 2.0;
  int N = 2;
  double C0t = 0.0;
  double r = 1.0;
  double b = 0.0;
  double rb = 0.0;
  Point center;  // outward normal point at distance rb from the boundary point
  double scale = 1.0;
  RadialEigenpair eigen;
};

/// Largest b on {2/3, 1/3, 1/6, ...} with λ₁/(rb)^p ≥ 1 + C̃0 and
/// B_{2rb}(center) ⊂ B_r(Q), where |P - Q| = offset.
double choose_b(const RadialEigenpair& eig, double r, double C0t, double offset = 0.0);

/// Upper barrier at boundary point P of `dom`, with Q = P unless given.
UpperBarrierParams upper_barrier_params(const DomainSpec& dom, Point P, double p, int N, double C0t, double r = 1.0,
                                        double scale = 1.0, std::optional<Point> Q = std::nullopt);
double eval_upper_barrier(const UpperBarrierParams& up, Point x);
/// max over s in (1, 2] of φ₁(s)/(s - 1).
double eigen_linear_bound(const RadialEigenpair& eig);

struct CertificationReport {
  std::string barrier;  // "lower" or "upper"
  std::string method;   // "grid2d" or "radial"
  std::vector<std::pair<std::string, double>> params;
  Point center;
  double r_in = 0.0, r_out = 0.0;
  SideReport side;
  bool pass() const { return side.passed() && side.tested > 0; }
};

/// Checks -Δ_p v + C̃0 r^{-p} v^{p-1} ≤ 0 on interior nodes of the annulus.
/// Uses the 2D polar grid when N = 2 and the weighted radial stencil otherwise.
CertificationReport certify_lower(const LowerBarrierParams& lp, std::size_t n_r = 129, std::size_t n_theta = 65,
                                  bool force_radial = false);
/// Checks -Δ_p φ - (C̃0 + 1) r^{-p} φ^{p-1} ≥ 0 on rb < s < 3rb.
CertificationReport certify_upper(const UpperBarrierParams& up, std::size_t n_r = 129, std::size_t n_theta = 65,
                                  bool force_radial = false);

std::string certification_json(const CertificationReport& rep);

}  // namespace bhl
