#include <algorithm>
#include <random>

#include "common.hpp"
#include "rmopt/errors.hpp"

namespace rmopt {

OptimizationResult particle_swarm(const Problem& problem, const StoppingCriteria& criteria, Rng& rng,
                                  const SwarmParams& params) {
  criteria.validate();
  if (params.population == 0) throw ContractError("particle_swarm: population must be positive");
  const Manifold& m = problem.manifold();
  Evaluator ev(problem);
  detail::Stopwatch clock;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t pop = params.population;
  std::vector<Point> pos;
  std::vector<Tangent> vel;
  std::vector<double> cost;
  for (std::size_t i = 0; i < pop; ++i) {
    pos.push_back(m.rand(rng));
    vel.push_back((params.initial_velocity_scale * m.typical_dist()) * m.randvec(pos.back(), rng));
    cost.push_back(ev.cost(pos.back()));
  }
  std::vector<Point> personal = pos;
  std::vector<double> personal_cost = cost;
  std::size_t leader = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  Point best = personal[leader];
  double best_cost = personal_cost[leader];

  auto mean_speed = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < pop; ++i) s += m.norm(pos[i], vel[i]);
    return s / static_cast<double>(pop);
  };

  OptimizationResult result;
  result.log.push_back({0, best_cost, detail::kNoGradient, mean_speed(), clock.elapsed(), 0});

  std::size_t iter = 0;
  StopReason reason;
  while (true) {
    if (auto r = detail::budget_exhausted(criteria, iter, clock.elapsed())) {
      reason = *r;
      break;
    }
    if (iter > 0 && result.log.back().step < criteria.min_step_size) {
      reason = StopReason::MinStepSize;
      break;
    }

    const double previous_best = best_cost;
    for (std::size_t i = 0; i < pop; ++i) {
      const double r1 = unit(rng);
      const double r2 = unit(rng);
      Tangent v = params.inertia * vel[i];
      if (params.cognitive != 0.0)
        v = axpy(v, params.cognitive * r1, detail::difference_direction(m, pos[i], personal[i]));
      if (params.social != 0.0)
        v = axpy(v, params.social * r2, detail::difference_direction(m, pos[i], best));
      // A zero velocity leaves the particle exactly where it is.
      if (frobenius_norm(v) == 0.0) {
        vel[i] = std::move(v);
        continue;
      }
      Point next = m.retr(pos[i], v);
      vel[i] = m.transp(pos[i], next, v);
      pos[i] = std::move(next);
      cost[i] = ev.cost(pos[i]);
      if (cost[i] < personal_cost[i]) {
        personal[i] = pos[i];
        personal_cost[i] = cost[i];
      }
    }
    for (std::size_t i = 0; i < pop; ++i) {
      if (personal_cost[i] < best_cost) {
        best_cost = personal_cost[i];
        best = personal[i];
      }
    }

    ++iter;
    result.log.push_back({iter, best_cost, detail::kNoGradient, mean_speed(), clock.elapsed(), 0});
    if (criteria.cost_stagnation_tol > 0.0 && previous_best - best_cost < criteria.cost_stagnation_tol) {
      reason = StopReason::Stagnation;
      break;
    }
  }

  result.point = std::move(best);
  result.cost = best_cost;
  result.grad_norm = detail::kNoGradient;
  result.stop_reason = reason;
  return result;
}

}  // namespace rmopt
