#pragma once

#include <vector>

namespace bhl {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root-mean-square residual
};

/// Least-squares y ≈ slope x + intercept; needs at least two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y against log x (all samples positive).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bhl
