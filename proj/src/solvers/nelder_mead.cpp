#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "rmopt/errors.hpp"

namespace rmopt {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;

// Balanced pairwise reduction with pairmean. Exact for two points; for more
// it approximates the Riemannian centroid.
Point centroid(const Manifold& m, std::vector<Point> pts) {
  while (pts.size() > 1) {
    std::vector<Point> next;
    next.reserve((pts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) next.push_back(m.pairmean(pts[i], pts[i + 1]));
    if (pts.size() % 2 == 1) next.push_back(std::move(pts.back()));
    pts = std::move(next);
  }
  return std::move(pts.front());
}

}  // namespace

OptimizationResult nelder_mead(const Problem& problem, const StoppingCriteria& criteria, Rng& rng) {
  criteria.validate();
  const Manifold& m = problem.manifold();
  if (!m.has_dist()) throw UnsupportedOperation("nelder_mead: " + m.name() + " lacks dist/pairmean");
  Evaluator ev(problem);
  detail::Stopwatch clock;

  const std::size_t n = m.dim();
  std::vector<Point> simplex;
  std::vector<double> costs;
  for (std::size_t i = 0; i <= n; ++i) {
    simplex.push_back(m.rand(rng));
    costs.push_back(ev.cost(simplex.back()));
  }

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    std::vector<Point> s;
    std::vector<double> c;
    for (std::size_t i : order) {
      s.push_back(std::move(simplex[i]));
      c.push_back(costs[i]);
    }
    simplex = std::move(s);
    costs = std::move(c);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) d = std::max(d, m.dist(simplex[0], simplex[i]));
    return d;
  };

  sort_simplex();
  OptimizationResult result;
  result.log.push_back({0, costs[0], detail::kNoGradient, diameter(), clock.elapsed(), 0});

  std::size_t iter = 0;
  StopReason reason;
  while (true) {
    if (auto r = detail::budget_exhausted(criteria, iter, clock.elapsed())) {
      reason = *r;
      break;
    }
    if (result.log.back().step < criteria.min_step_size) {
      reason = StopReason::MinStepSize;
      break;
    }
    if (criteria.cost_stagnation_tol > 0.0 && costs[n] - costs[0] < criteria.cost_stagnation_tol) {
      reason = StopReason::Stagnation;
      break;
    }

    const Point c = centroid(m, std::vector<Point>(simplex.begin(), simplex.begin() + static_cast<std::ptrdiff_t>(n)));
    const Tangent toward_worst = detail::difference_direction(m, c, simplex[n]);

    Point xr = m.retr(c, -kReflect * toward_worst);
    const double fr = ev.cost(xr);
    bool shrink = false;
    if (fr < costs[0]) {
      Point xe = m.retr(c, -kExpand * toward_worst);
      const double fe = ev.cost(xe);
      if (fe < fr) {
        simplex[n] = std::move(xe);
        costs[n] = fe;
      } else {
        simplex[n] = std::move(xr);
        costs[n] = fr;
      }
    } else if (fr < costs[n - 1]) {
      simplex[n] = std::move(xr);
      costs[n] = fr;
    } else if (fr < costs[n]) {
      Point xoc = m.retr(c, -kContract * toward_worst);
      const double foc = ev.cost(xoc);
      if (foc <= fr) {
        simplex[n] = std::move(xoc);
        costs[n] = foc;
      } else {
        shrink = true;
      }
    } else {
      Point xic = m.retr(c, kContract * toward_worst);
      const double fic = ev.cost(xic);
      if (fic < costs[n]) {
        simplex[n] = std::move(xic);
        costs[n] = fic;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        simplex[i] = m.pairmean(simplex[0], simplex[i]);
        costs[i] = ev.cost(simplex[i]);
      }
    }

    sort_simplex();
    ++iter;
    result.log.push_back({iter, costs[0], detail::kNoGradient, diameter(), clock.elapsed(), 0});
  }

  result.point = simplex[0];
  result.cost = costs[0];
  result.grad_norm = detail::kNoGradient;
  result.stop_reason = reason;
  return result;
}

}  // namespace rmopt
