#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bhl/geometry.hpp"

namespace bhl {

/// Potential of the equation -div(|Du|^{p-2}Du) - d(x)u^{p-1} = 0.
/// The inverse-power form is d(x) = -c|x|^{-p} with c ≥ 0, so d ≤ 0.
struct PotentialSpec {
  enum class Form { zero, inverse_power };

  Form form = Form::zero;
  double c = 0.0;
  double C0 = 0.0;  // bound |d(x)| ≤ C0 |x|^{-p}

  static PotentialSpec zero() { return {}; }
  static PotentialSpec inverse_power(double c);

  double strength() const { return form == Form::zero ? 0.0 : c; }
  double d(Point x, double p) const;
  /// |d(x)| ≤ C0|x|^{-p} at every sample.
  bool satisfies_bound(const std::vector<Point>& samples, double p) const;
};

struct SolverLog {
  int iterations = 0;
  double final_residual = 0.0;
  double regularization_floor = 0.0;  // absolute gradient floor of the last stage
  double p = 2.0;
  double potential_c = 0.0;
};

/// Nodal values of a nonnegative function on a polar grid.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::shared_ptr<const PolarGrid> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {}

  const PolarGrid& grid() const { return *grid_; }
  const std::shared_ptr<const PolarGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t id) const { return values_[id]; }

  /// Value at a physical point; nullopt outside the grid.
  std::optional<double> at(Point x) const;
  /// Value at polar coordinates relative to the grid center.
  std::optional<double> at_polar(double r, double theta) const { return grid_->interpolate(values_, r, theta); }

  ScalarField scaled(double k) const;

  SolverLog log;

 private:
  std::shared_ptr<const PolarGrid> grid_;
  std::vector<double> values_;
};

/// Samples f(x) at every node.
ScalarField sample_field(std::shared_ptr<const PolarGrid> grid, const std::function<double(Point)>& f);

/// Data on truncation-arc nodes as a function of (r, θ); dirichlet-zero nodes are 0.
using ArcData = std::function<double(double r, double theta)>;

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 200;  // total outer steps over all continuation stages
  /// Relative gradient floors; the absolute floor is this value times
  /// max(arc data) / outer radius, which keeps the discrete problem
  /// homogeneous in the data and invariant under dilation.
  std::vector<double> regularization = {1e-2, 1e-4, 1e-6, 1e-8};
  const std::vector<double>* initial_guess = nullptr;
};

ScalarField solve_dirichlet(std::shared_ptr<const PolarGrid> grid, double p, const PotentialSpec& pot,
                            const ArcData& arc_data, const SolverOptions& opts = {});

/// Scaled weak-form residual: max over interior nodes of
/// |R_i| r_i / (V_i |Du|_i^{p-1}), where R_i is the discrete weak residual
/// against the nodal hat function, V_i the dual cell area and r_i the node's
/// distance to the grid center. Dimensionless; zero for exact discrete
/// solutions and O(h²) for smooth exact solutions.
double weak_residual(const ScalarField& field, double p, const PotentialSpec& pot);

/// Pointwise discrete operator -div(|Du|^{p-2}Du) + κ u^{p-1} at interior
/// nodes (NaN elsewhere), using R_i / V_i with no gradient regularization.
std::vector<double> apply_operator(const ScalarField& field, double p, double kappa);

enum class Side { subsolution, supersolution };

struct SideFailure {
  std::size_t node = 0;
  double residual = 0.0;
};

struct SideReport {
  std::vector<SideFailure> failures;
  std::size_t tested = 0;
  double worst = 0.0;  // largest signed violation (0 when none)
  bool passed() const { return failures.empty(); }
};

/// Checks -div(|Du|^{p-2}Du) + κ u^{p-1} ≤ 0 (subsolution) or ≥ 0
/// (supersolution) at interior nodes accepted by `region` (all when empty).
SideReport side_condition_check(const ScalarField& field, double p, double kappa, Side side,
                                const std::function<bool(std::size_t)>& region = {});

/// Radial variant in dimension N: profile samples V(s_k) on a uniform grid,
/// operator -s^{1-N}(s^{N-1}|V'|^{p-2}V')' + κ V^{p-1} at interior samples.
SideReport side_condition_check_radial(const std::vector<double>& s, const std::vector<double>& values,
                                       double p, int N, double kappa, Side side);

/// First Dirichlet eigenpair of the radial p-Laplacian on the annulus 1 < |y| < 3 in R^N.
struct RadialEigenpair {
  double lambda1 = 0.0;
  double p = 2.0;
  int N = 2;
  std::vector<double> s;     // uniform samples on [1, 3]
  std::vector<double> phi;   // φ₁(s), φ₁(2) = 1
  std::vector<double> dphi;  // φ₁'(s)

  double value(double s) const;
  double derivative(double s) const;
};

RadialEigenpair eigen_annulus_radial(double p, int N, std::size_t steps = 20000);

struct ComparisonReport {
  bool ordered = true;
  double max_violation = 0.0;        // max over interior of (u2 - u1), clipped at 0
  double max_violation_ratio = 0.0;  // max of violation / slack
  std::size_t worst_node = 0;
};

/// Checks u1 ≥ u2 - slack at every interior node, with
/// slack_i = 1e-8·max|u| + C h̃² max(u1_i, u2_i) and h̃² the relative grid
/// resolution. Throws SolverError("precondition") when the boundary ordering fails.
ComparisonReport comparison_check(const ScalarField& u1, const ScalarField& u2, double slack_constant = 1.0);

}  // namespace bhl
