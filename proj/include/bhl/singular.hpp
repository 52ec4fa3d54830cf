#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bhl/plaplace.hpp"
#include "bhl/spherical.hpp"

namespace bhl {

struct LadderOptions {
  double radius = 1.0;       // half-disk radius R
  double eps0 = 0.125;       // ε₀ = R/8
  int K = 5;                 // levels k = 0..K, ε_k = ε₀ 2^{-k}
  std::size_t per_octave = 16;
  std::size_t n_theta = 129;
  double arc_scale = 1.0;
  /// Multiplies the trace of V on the arc; must be positive on (0, π).
  std::function<double(double)> arc_shape;
  double slack_C = 1.0;      // C in the 1e-8 + C h² allowances
  SolverOptions solver;
};

/// Truncated Dirichlet problems on the half-disk minus B_ε with data V = r^{-β}η on the arc.
struct TruncationLadder {
  double p = 2.0;
  double c = 0.0;
  AngularProfile profile;  // singular half-plane profile for (p, c)
  LadderOptions opts;
  std::vector<double> epsilons;
  std::vector<ScalarField> fields;
  double K_bar = 0.0;  // max of V on the outer arc

  double V(double r, double theta) const;
};

ScalarField truncated_solve(const DomainSpec& dom, double p, double c, double eps, const AngularProfile& profile,
                            const LadderOptions& opts, const std::vector<double>* warm = nullptr);

TruncationLadder build_ladder(double p, double c, const LadderOptions& opts = {});

struct LadderReport {
  std::vector<double> epsilons;
  /// min over levels and common interior nodes of u_{ε_{k+1}} - u_{ε_k} + (1e-8 + C h²)
  /// with h the local mesh size; nonnegative iff the increasing-as-ε↓ ordering holds.
  double monotonicity_min = 0.0;
  /// margin for the ordering u_{ε_{k+1}} ≤ u_{ε_k} (ε ↦ u_ε increasing), with
  /// slack 1e-8 max|u| + C h̃² |u| and h̃² the relative grid resolution.
  double decreasing_margin_min = 0.0;
  double sandwich_max = 0.0;              // max of V - u over all levels and nodes
  double sandwich_upper_violation = 0.0;  // max of (u - V - slack)⁺
  double sandwich_lower_violation = 0.0;  // max of (V - u - K̄)⁺
  std::vector<double> convergence_diffs;  // relative max differences on the comparison annulus
  bool converged = false;
  double K_bar = 0.0;
};

LadderReport analyze_ladder(const TruncationLadder& ladder);
std::string ladder_json(const LadderReport& rep);

/// Finest field with convergence diagnostics; throws SingularError("scheme-violation")
/// when the ladder breaks the ε ↦ u_ε ordering beyond slack.
ScalarField singular_limit(const TruncationLadder& ladder, LadderReport* report = nullptr);

struct BlowupPoint {
  double r = 0.0;
  double sup_deviation = 0.0;  // sup_θ |r^β u - κη|
  double relative = 0.0;       // divided by κ max η
};

/// Deviations at the given radii after fitting κ by least squares at the smallest one.
std::vector<BlowupPoint> blowup_rate(const ScalarField& field, const AngularProfile& profile,
                                     const std::vector<double>& radii);

struct ConeFit {
  double beta_hat = 0.0;
  double rms = 0.0;
  double fit_r_min = 0.0, fit_r_max = 0.0;
  std::vector<double> octave_slopes;  // -d log max v / d log r per octave in the window
  bool contamination_advisory = false;
  int iterations = 0;
};

struct ConeOptions {
  double R_out = 4096.0;
  std::size_t per_octave = 21;
  std::size_t n_theta = 129;
  double fit_r_min = 16.0;
  double fit_r_max = 256.0;
  double advisory_spread = 0.05;
};

/// Solves the cone problem on 1 ≤ |x| ≤ R_out with unit data on the inner arc
/// and fits the decay exponent of max_θ v.
ConeFit tolksdorff_cone_fit(double opening, double p, double c, const ConeOptions& opts = {});

struct MoebiusReport {
  double residual = 0.0;
  double r_in = 0.0, r_out = 0.0;  // annulus of the inverted field
  std::size_t nodes = 0;
};

/// Pulls `field` back under x ↦ x/|x|² onto the half-annulus r_in ≤ |y| ≤ r_out
/// (node-aligned with the source grid) and evaluates weak_residual there.
MoebiusReport moebius_check(const ScalarField& field, double p, double r_in, double r_out);

}  // namespace bhl
