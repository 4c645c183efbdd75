#include <algorithm>

#include "common.hpp"

namespace rmopt {

OptimizationResult conjugate_gradient(const Problem& problem, const Point& x0, const StoppingCriteria& criteria) {
  criteria.validate();
  const Manifold& m = problem.manifold();
  m.check_layout(x0, "conjugate_gradient");
  Evaluator ev(problem);
  detail::Stopwatch clock;

  OptimizationResult result;
  Point x = x0;
  double f = ev.cost(x);
  Tangent g = ev.gradient(x);
  double gg = m.inner(x, g, g);
  double gnorm = std::sqrt(gg);
  Tangent direction = -g;
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
    double slope = m.inner(x, g, direction);
    bool restarted = false;
    if (!(slope < 0.0)) {
      direction = -g;
      slope = -gg;
      restarted = true;
    }
    auto ls = detail::armijo_backtracking(
        ev, x, f, direction, slope, detail::initial_alpha(m, alpha, m.norm(x, direction), last_decrease, slope));
    if (!ls.success && !restarted) {
      direction = -g;
      ls = detail::armijo_backtracking(ev, x, f, direction, -gg,
                                       detail::initial_alpha(m, alpha, gnorm, last_decrease, -gg));
    }
    if (!ls.success) {
      reason = StopReason::MinStepSize;
      break;
    }
    ++iter;
    const double decrease = f - ls.cost;
    alpha = ls.alpha;
    last_decrease = decrease;
    Point x_new = std::move(ls.x);
    const Tangent g_new = ev.gradient(x_new);
    const double gg_new = m.inner(x_new, g_new, g_new);

    // Polak–Ribière+ with transported previous gradient.
    const Tangent g_old = m.transp(x, x_new, g);
    const double beta = std::max(0.0, m.inner(x_new, g_new, g_new - g_old) / gg);
    const Tangent d_old = m.transp(x, x_new, direction);
    direction = beta > 0.0 ? axpy(-g_new, beta, d_old) : -g_new;

    x = std::move(x_new);
    f = ls.cost;
    g = g_new;
    gg = gg_new;
    gnorm = std::sqrt(gg);
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
