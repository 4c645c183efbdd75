#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "rmopt/solvers.hpp"

namespace rmopt::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Criteria shared by every solver, checked before each iteration.
inline std::optional<StopReason> budget_exhausted(const StoppingCriteria& c, std::size_t iteration,
                                                  double elapsed) {
  if (iteration >= c.max_iterations) return StopReason::MaxIterations;
  if (elapsed >= c.max_time_s) return StopReason::MaxTime;
  return std::nullopt;
}

inline constexpr double kNoGradient = std::numeric_limits<double>::quiet_NaN();

/// Surrogate for the logarithm: the ambient difference y − x projected onto T_x.
inline Tangent difference_direction(const Manifold& m, const Point& x, const Point& y) {
  return m.proj(x, y - x);
}

struct LineSearchResult {
  Point x;
  double cost = 0.0;
  double alpha = 0.0;
  double step_length = 0.0;
  bool success = false;
};

/// Backtracking Armijo search along `direction` starting from multiplier
/// `alpha`. `slope` is ⟨grad, direction⟩ and must be negative.
LineSearchResult armijo_backtracking(Evaluator& ev, const Point& x, double fx, const Tangent& direction,
                                     double slope, double alpha);

/// Initial multiplier: the previous accepted one grown by kStepGrowth, with
/// the step length capped at the manifold's typical distance. When the last
/// iteration decreased the cost, the guess is also capped by the quadratic
/// interpolation 2·decrease/(−slope); without that cap a power-of-two step
/// can sit where the dominant curvature direction oscillates neutrally.
double initial_alpha(const Manifold& m, double previous_alpha, double direction_norm,
                     double previous_decrease = 0.0, double slope = 0.0);

}  // namespace rmopt::detail
