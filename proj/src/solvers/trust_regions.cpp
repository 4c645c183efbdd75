#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"

namespace rmopt {

TcgResult truncated_cg(Evaluator& ev, const Point& x, const Tangent& grad, double radius,
                       std::size_t max_iterations, double theta, double kappa) {
  const Manifold& m = ev.manifold();
  TcgResult out;
  out.step = m.zerovec(x);
  out.hess_step = m.zerovec(x);
  out.iterate_norms.push_back(0.0);

  Tangent r = grad;
  double rr = m.inner(x, r, r);
  const double r0 = std::sqrt(rr);
  if (r0 == 0.0) {
    out.stop = TcgStop::ResidualSmall;
    return out;
  }
  const double target = r0 * std::min(std::pow(r0, theta), kappa);
  Tangent delta = -r;
  double model = 0.0;

  for (std::size_t j = 0; j < max_iterations; ++j) {
    const Tangent hdelta = ev.hess_vec(x, delta);
    const double dhd = m.inner(x, delta, hdelta);
    const double alpha = rr / dhd;

    const double ee = m.inner(x, out.step, out.step);
    const double ed = m.inner(x, out.step, delta);
    const double dd = m.inner(x, delta, delta);
    const double ee_next = ee + 2.0 * alpha * ed + alpha * alpha * dd;

    if (dhd <= 0.0 || ee_next >= radius * radius) {
      // Positive root of ‖η + τδ‖ = radius.
      const double disc = std::max(0.0, ed * ed + dd * (radius * radius - ee));
      const double tau = (-ed + std::sqrt(disc)) / dd;
      out.step = axpy(out.step, tau, delta);
      out.hess_step = axpy(out.hess_step, tau, hdelta);
      out.stop = dhd <= 0.0 ? TcgStop::NegativeCurvature : TcgStop::ExceededRadius;
      out.hit_boundary = true;
      out.iterations = j + 1;
      out.iterate_norms.push_back(m.norm(x, out.step));
      return out;
    }

    Tangent step_next = axpy(out.step, alpha, delta);
    Tangent hstep_next = axpy(out.hess_step, alpha, hdelta);
    const double model_next = m.inner(x, grad, step_next) + 0.5 * m.inner(x, step_next, hstep_next);
    if (model_next >= model) {
      out.stop = TcgStop::ModelIncrease;
      out.iterations = j + 1;
      return out;
    }
    out.step = std::move(step_next);
    out.hess_step = std::move(hstep_next);
    model = model_next;
    out.iterations = j + 1;
    out.iterate_norms.push_back(m.norm(x, out.step));

    r = m.proj(x, axpy(r, alpha, hdelta));
    const double rr_next = m.inner(x, r, r);
    if (std::sqrt(rr_next) <= target) {
      out.stop = TcgStop::ResidualSmall;
      return out;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    delta = m.proj(x, axpy(-r, beta, delta));
  }
  out.stop = TcgStop::MaxInner;
  return out;
}

OptimizationResult trust_regions(const Problem& problem, const Point& x0, const StoppingCriteria& criteria,
                                 const TrustRegionParams& params) {
  criteria.validate();
  const Manifold& m = problem.manifold();
  m.check_layout(x0, "trust_regions");
  Evaluator ev(problem);
  detail::Stopwatch clock;

  const double max_radius = params.max_radius > 0.0 ? params.max_radius : m.typical_dist();
  double radius = params.initial_radius > 0.0 ? params.initial_radius : m.typical_dist() / 8.0;
  radius = std::min(radius, max_radius);
  const std::size_t max_inner = params.max_inner_iterations > 0 ? params.max_inner_iterations : m.dim();
  const double min_radius = 1e-15 * m.typical_dist();

  OptimizationResult result;
  Point x = x0;
  double f = ev.cost(x);
  Tangent g = ev.gradient(x);
  double gnorm = m.norm(x, g);
  result.log.push_back({0, f, gnorm, radius, clock.elapsed(), 0});

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

    const TcgResult tcg = truncated_cg(ev, x, g, radius, max_inner);
    Point candidate = m.retr(x, tcg.step);
    const double fc = ev.cost(candidate);
    const double model_decrease =
        -(m.inner(x, g, tcg.step) + 0.5 * m.inner(x, tcg.step, tcg.hess_step));

    // Regularize ρ so that rounding noise near convergence does not make
    // it meaningless.
    const double reg = std::max(1.0, std::abs(f)) * std::numeric_limits<double>::epsilon() * 1e3;
    double rho = -std::numeric_limits<double>::infinity();
    if (model_decrease > 0.0 && std::isfinite(fc)) rho = (f - fc + reg) / (model_decrease + reg);

    if (rho < kRhoShrink) {
      radius *= kRadiusShrink;
    } else if (rho > kRhoExpand && tcg.hit_boundary) {
      radius = std::min(kRadiusExpand * radius, max_radius);
    }

    ++iter;
    const bool accept = rho > kRhoAccept && fc <= f;
    double decrease = 0.0;
    if (accept) {
      decrease = f - fc;
      x = std::move(candidate);
      f = fc;
      g = ev.gradient(x);
      gnorm = m.norm(x, g);
    }
    result.log.push_back({iter, f, gnorm, radius, clock.elapsed(), tcg.iterations});

    if (radius < min_radius) {
      reason = StopReason::MinStepSize;
      break;
    }
    if (accept && criteria.cost_stagnation_tol > 0.0 && decrease < criteria.cost_stagnation_tol) {
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
