#include <algorithm>
#include <string>

#include "common.hpp"
#include "rmopt/errors.hpp"

namespace rmopt {

void StoppingCriteria::validate() const {
  if (grad_tolerance < 0.0 || min_step_size < 0.0 || max_time_s < 0.0 || cost_stagnation_tol < 0.0 ||
      std::isnan(grad_tolerance) || std::isnan(min_step_size) || std::isnan(max_time_s) ||
      std::isnan(cost_stagnation_tol)) {
    throw ContractError("StoppingCriteria: all criteria must be nonnegative numbers");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradTolerance: return "GradTolerance";
    case StopReason::MaxIterations: return "MaxIterations";
    case StopReason::MinStepSize: return "MinStepSize";
    case StopReason::MaxTime: return "MaxTime";
    case StopReason::Stagnation: return "Stagnation";
  }
  return "Unknown";
}

namespace detail {

double initial_alpha(const Manifold& m, double previous_alpha, double direction_norm, double previous_decrease,
                     double slope) {
  double alpha = previous_alpha > 0.0 ? kStepGrowth * previous_alpha : 1.0;
  if (previous_alpha > 0.0 && previous_decrease > 0.0 && slope < 0.0)
    alpha = std::min(alpha, 2.0 * previous_decrease / -slope);
  if (direction_norm > 0.0) alpha = std::min(alpha, m.typical_dist() / direction_norm);
  return alpha;
}

LineSearchResult armijo_backtracking(Evaluator& ev, const Point& x, double fx, const Tangent& direction,
                                     double slope, double alpha) {
  const Manifold& m = ev.manifold();
  const double dnorm = m.norm(x, direction);
  for (int k = 0; k <= kMaxBacktracks; ++k) {
    Point candidate = m.retr(x, alpha * direction);
    const double fc = ev.cost(candidate);
    if (fc <= fx + kArmijoC1 * alpha * slope) {
      return {std::move(candidate), fc, alpha, alpha * dnorm, true};
    }
    alpha *= kBacktrackContraction;
  }
  return {x, fx, 0.0, 0.0, false};
}

}  // namespace detail
}  // namespace rmopt
