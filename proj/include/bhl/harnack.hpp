#pragma once

#include <string>
#include <vector>

#include "bhl/geometry.hpp"
#include "bhl/plaplace.hpp"

namespace bhl {

/// One measured constant. Every estimate is a ratio of field values, so
/// records are invariant under u → ku.
struct HarnackRecord {
  std::string estimate_id;
  double r = 0.0;
  double constant = 0.0;
  std::vector<double> radii;  // radii at which the constant was measured
  std::string grid_id;
  int level = 0;
};

struct HarnackReport {
  std::vector<HarnackRecord> records;
  std::size_t excluded = 0;  // denominators below 1e-14 dropped from ratios

  void add(std::string id, double r, double constant, std::vector<double> radii = {}, std::string grid_id = {},
           int level = 0);
  std::vector<HarnackRecord> find(const std::string& id) const;
  std::string to_json() const;
  std::string to_csv() const;  // estimate_id,r,constant
};

/// sup/inf of u over B_r(P), sampled on a fixed polar pattern.
double interior_harnack(const ScalarField& u, Point P, double r);

/// max over sampled x, y in B_{3r/2}(Q) ∩ Ω with ρ ≥ r/2^h of (u(x)/u(y))^{1/h}.
double chained_harnack(const ScalarField& u, Point Q, double r, int h);

struct DecayFit {
  double delta = 0.0;
  double c3 = 0.0;
  std::size_t samples = 0;
};
/// Hölder exponent of u along the inward normal at boundary point P over (0, s].
DecayFit boundary_decay(const ScalarField& u, Point P, double s);

/// max over B_r(Q) ∩ Ω of u / u(A_{r/2}(Q)).
double carleson_constant(const ScalarField& u, Point Q, double r);

/// Smallest c₆ with t/(c₆ r) ≤ u(N_t(P))/u(N_{r/2}(Q)) ≤ c₆ t/r over sampled
/// boundary points P ∈ B_r(Q) and t on a dyadic ladder below rb/2.
double two_sided_slope(const ScalarField& u, Point Q, double r, double b = 1.0 / 3.0);

struct AprioriFit {
  double alpha = 0.0;
  double slope_upper = 0.0;  // log max (u/(ρ u(A))) vs log |x|
  double slope_lower = 0.0;
  double c_upper = 0.0, c_lower = 0.0;
  std::vector<double> radii;
};
/// Envelopes of u(x)/(ρ(x)u(A)) on dyadic annuli; α is the least value with
/// ρ|x|^{α-1} ≲ u ≲ ρ|x|^{-α-1} on the sampled range.
AprioriFit apriori_alpha(const ScalarField& u, Point A);

struct UniformityRatio {
  double c9 = 0.0;
  double c9_vertical = 0.0;
};
UniformityRatio ratio_uniformity(const ScalarField& u, double r);

/// c₁₀: max double ratio (u1(x)/u2(x))(u2(y)/u1(y)) over B_r(Q) ∩ Ω.
double boundary_harnack(const ScalarField& u1, const ScalarField& u2, Point Q, double r,
                        std::size_t* excluded = nullptr);
/// c₁₁: sup/inf of u1/u2 over Ω ∩ (B_r ∖ B_{r/2}).
double boundary_harnack_annulus(const ScalarField& u1, const ScalarField& u2, double r,
                                std::size_t* excluded = nullptr);

enum class Verdict { singular, bounded, inconclusive };
const char* to_string(Verdict v);

struct SingularityResult {
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> radii;   // dyadic ladder, decreasing
  std::vector<double> m;       // min over |x| = r of |x| u / ρ
  std::vector<double> ratios;  // m(r/2)/m(r) over the last three halvings
};
/// Singular iff m grows by ≥ 1.5 per halving over the last three levels;
/// bounded iff it grows by at most 1.1 per halving there.
SingularityResult singularity_test(const ScalarField& u);

struct QuotientResult {
  double k = 0.0;
  double deviation = 0.0;
  std::size_t nodes = 0;
};
/// k = median of v/u over interior nodes with r_min ≤ |x| ≤ r0; deviation = max |v/(ku) - 1|.
QuotientResult quotient_constancy(const ScalarField& u, const ScalarField& v, double r0, double r_min = 0.0);

}  // namespace bhl
