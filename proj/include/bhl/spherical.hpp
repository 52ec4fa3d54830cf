#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bhl/plaplace.hpp"

namespace bhl {

enum class ExponentKind { regular, singular };
enum class AngularGeometry { planar_sector, axisymmetric_cap };

const char* to_string(ExponentKind k);
const char* to_string(AngularGeometry g);
ExponentKind parse_exponent_kind(const std::string& s);

/// λ(a) = a(a(p-1) + p - N) (singular) or a(a(p-1) + N - p) (regular).
double lambda_of(double a, double p, int N, ExponentKind kind);

/// Angular factor η of a separable solution r^{±a}η(θ) of
/// -Δ_p u + c|x|^{-p}u^{p-1} = 0 in a cone of opening θ0. Planar profiles are
/// normalized by η'(0) = 1 and vanish at both ends; cap profiles are
/// normalized by η(0) = 1 and vanish at θ0.
struct AngularProfile {
  double a = 0.0;
  double lambda = 0.0;
  double p = 2.0;
  int N = 2;
  double c = 0.0;
  double theta0 = 0.0;
  ExponentKind kind = ExponentKind::singular;
  AngularGeometry geometry = AngularGeometry::planar_sector;
  std::vector<double> theta, eta, deta;

  double eval(double th) const;
  double derivative(double th) const;
  double max_eta() const;
};

struct ShotResult {
  bool crossed = false;
  double theta_star = 0.0;  // first zero of η (when crossed)
  AngularProfile profile;   // samples on [0, θ*] when requested
};

ShotResult angular_shoot(double a, double p, int N, ExponentKind kind, double c, AngularGeometry geometry,
                         bool keep_samples = false, double step = 1e-4);

/// Solves θ*(a) = θ0 for a in [1e-3, 50] by a log-grid scan and bisection.
AngularProfile exponent_for_opening(double theta0, double p, int N, ExponentKind kind, double c,
                                    AngularGeometry geometry, double tol = 1e-8);

/// r^{a}η(θ) (regular) or r^{-a}η(θ) (singular) at the grid nodes.
ScalarField separable_field(const AngularProfile& profile, std::shared_ptr<const PolarGrid> grid);

}  // namespace bhl
