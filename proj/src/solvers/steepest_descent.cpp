#include "common.hpp"

namespace rmopt {

OptimizationResult steepest_descent(const Problem& problem, const Point& x0, const StoppingCriteria& criteria) {
  criteria.validate();
  const Manifold& m = problem.manifold();
  m.check_layout(x0, "steepest_descent");
  Evaluator ev(problem);
  detail::Stopwatch clock;

  OptimizationResult result;
  Point x = x0;
  double f = ev.cost(x);
  Tangent g = ev.gradient(x);
  double gnorm = m.norm(x, g);
  result.log.push_back({0, f, gnorm, 0.0, clock.elapsed(), 0});

  double alpha = 0.0;
  double last_decrease = 0.0;
  std::size_t iter = 0;
  StopReason reason;
  while (true) {
    if (gnorm <= criteria.grad_tolerance) {
      reason = StopReason::GradTolerance;
      break;
    }
    if (auto r = detail::budget_exhausted(criteria, iter, clock.elapsed())) {
      reason = *r;
      break;
    }
    const Tangent direction = -g;
    auto ls = detail::armijo_backtracking(ev, x, f, direction, -gnorm * gnorm,
                                          detail::initial_alpha(m, alpha, gnorm, last_decrease, -gnorm * gnorm));
    if (!ls.success) {
      reason = StopReason::MinStepSize;
      break;
    }
    ++iter;
    const double decrease = f - ls.cost;
    alpha = ls.alpha;
    last_decrease = decrease;
    x = std::move(ls.x);
    f = ls.cost;
    g = ev.gradient(x);
    gnorm = m.norm(x, g);
    result.log.push_back({iter, f, gnorm, ls.step_length, clock.elapsed(), 0});

    if (ls.step_length < criteria.min_step_size) {
      reason = StopReason::MinStepSize;
      break;
    }
    if (criteria.cost_stagnation_tol > 0.0 && decrease < criteria.cost_stagnation_tol) {
      reason = StopReason::Stagnation;
      break;
    }
  }

  result.point = std::move(x);
  result.cost = f;
  result.grad_norm = gnorm;
  result.stop_reason = reason;
  return result;
}

}  // namespace rmopt
