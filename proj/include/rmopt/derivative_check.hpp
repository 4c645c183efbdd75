#pragma once

#include <utility>
#include <vector>

#include "rmopt/problem.hpp"

namespace rmopt {

/// Outcome of a Taylor-remainder test along a random direction.
struct CheckReport {
  /// (t, residual) for t log-spaced from 1e-1 down to 1e-6.
  std::vector<std::pair<double, double>> slopes;
  /// Log-log slope over the best-fitting contiguous decade of t.
  double fitted_slope = 0.0;
  /// Slope the check required.
  double threshold = 0.0;
  bool pass = false;
  /// Every residual sat at rounding level: the model is exact along the curve.
  bool exact = false;
};

/// Residual |f(R(x,tu)) − f(x) − t⟨grad f, u⟩|; passes when the fitted slope
/// is at least 1.9.
CheckReport check_gradient(const Problem& problem, const Point& x, Rng& rng);

/// Residual |f(R(x,tu)) − f(x) − t⟨g,u⟩ − t²/2·⟨Hu,u⟩| along a second-order
/// retraction; passes at slope 2.9 for exact Hessians and 2.5 for
/// finite-difference ones.
CheckReport check_hessian(const Problem& problem, const Point& x, Rng& rng);

/// Least-squares slope of log(residual) against log(t).
double loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace rmopt
