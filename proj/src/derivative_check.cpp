#include "rmopt/derivative_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmopt {
namespace {

constexpr int kPointsPerDecade = 10;
constexpr double kLargestStep = 1e-1;
constexpr int kDecades = 5;

std::vector<double> step_sizes() {
  std::vector<double> ts;
  for (int i = 0; i <= kDecades * kPointsPerDecade; ++i)
    ts.push_back(kLargestStep * std::pow(10.0, -static_cast<double>(i) / kPointsPerDecade));
  return ts;
}

double fit_error(std::span<const std::pair<double, double>> pts, double slope) {
  double mx = 0.0, my = 0.0;
  for (const auto& [t, r] : pts) {
    mx += std::log10(t);
    my += std::log10(r);
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double err = 0.0;
  for (const auto& [t, r] : pts) {
    const double d = (std::log10(r) - my) - slope * (std::log10(t) - mx);
    err += d * d;
  }
  return err;
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Error scale of the gradient's directional derivative along a unit tangent:
// zero for exact providers, rounding of the central difference otherwise.
double gradient_noise(const Problem& problem, const Point& x, double f0) {
  if (problem.provider() != DerivativeProvider::FiniteDifference) return 0.0;
  const double h = std::sqrt(kEps) * (1.0 + frobenius_norm(x));
  return 10.0 * kEps * std::max(1.0, std::abs(f0)) / h;
}

// Same for ⟨Hu,u⟩.
double hessian_noise(const Problem& problem, const Point& x, double f0) {
  if (problem.exact_hessian()) return 0.0;
  const double scale = std::max(1.0, std::abs(f0));
  if (problem.provider() == DerivativeProvider::FiniteDifference) {
    const double n1 = 1.0 + frobenius_norm(x);
    return 10.0 * std::sqrt(kEps) * scale / (n1 * n1);
  }
  return 10.0 * std::cbrt(kEps * kEps) * scale;
}

// Picks the decade window with the straightest log-log profile among those
// whose residuals all clear the noise floor. The floor is rounding in f plus
// whatever error the provider's derivatives carry, which grows with t.
CheckReport summarize(std::vector<std::pair<double, double>> pts, const std::vector<double>& floors,
                      double threshold) {
  CheckReport report;
  report.threshold = threshold;
  const std::size_t window = kPointsPerDecade + 1;

  bool all_at_floor = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].second > floors[i]) all_at_floor = false;
    pts[i].second = std::max(pts[i].second, std::numeric_limits<double>::min());
  }
  report.slopes = pts;

  if (all_at_floor) {
    report.exact = true;
    report.pass = true;
    report.fitted_slope = loglog_slope(pts);
    return report;
  }

  double best_err = std::numeric_limits<double>::infinity();
  double best_slope = std::numeric_limits<double>::quiet_NaN();
  bool found = false;
  for (int pass = 0; pass < 2 && !found; ++pass) {
    for (std::size_t s = 0; s + window <= pts.size(); ++s) {
      std::span<const std::pair<double, double>> w(pts.data() + s, window);
      bool above = true;
      for (std::size_t i = s; i < s + window; ++i) above = above && pts[i].second > floors[i];
      if (pass == 0 && !above) continue;
      const double slope = loglog_slope(w);
      const double err = fit_error(w, slope);
      if (err < best_err) {
        best_err = err;
        best_slope = slope;
        found = true;
      }
    }
  }
  report.fitted_slope = best_slope;
  report.pass = best_slope >= threshold;
  return report;
}

}  // namespace

double loglog_slope(std::span<const std::pair<double, double>> points) {
  double mx = 0.0, my = 0.0;
  for (const auto& [t, r] : points) {
    mx += std::log10(t);
    my += std::log10(r);
  }
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [t, r] : points) {
    const double dx = std::log10(t) - mx;
    sxy += dx * (std::log10(r) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

CheckReport check_gradient(const Problem& problem, const Point& x, Rng& rng) {
  const Manifold& m = problem.manifold();
  Evaluator ev(problem);
  const double f0 = ev.cost(x);
  const Tangent g = ev.gradient(x);
  const Tangent u = m.randvec(x, rng);
  const double slope0 = m.inner(x, g, u);

  const double base = 1e2 * kEps * std::max(1.0, std::abs(f0));
  const double eg = gradient_noise(problem, x, f0);
  std::vector<std::pair<double, double>> pts;
  std::vector<double> floors;
  for (double t : step_sizes()) {
    const double ft = ev.cost(m.retr(x, t * u));
    pts.emplace_back(t, std::abs(ft - f0 - t * slope0));
    floors.push_back(base + t * eg);
  }
  return summarize(std::move(pts), floors, 1.9);
}

CheckReport check_hessian(const Problem& problem, const Point& x, Rng& rng) {
  const Manifold& m = problem.manifold();
  Evaluator ev(problem);
  const double f0 = ev.cost(x);
  const Tangent g = ev.gradient(x);
  const Tangent u = m.randvec(x, rng);
  const Tangent hu = ev.hess_vec(x, u);
  const double first = m.inner(x, g, u);
  const double second = m.inner(x, hu, u);

  const double base = 1e2 * kEps * std::max(1.0, std::abs(f0));
  const double eg = gradient_noise(problem, x, f0);
  const double eh = hessian_noise(problem, x, f0);
  std::vector<std::pair<double, double>> pts;
  std::vector<double> floors;
  for (double t : step_sizes()) {
    const double ft = ev.cost(m.retr_second_order(x, t * u));
    pts.emplace_back(t, std::abs(ft - f0 - t * first - 0.5 * t * t * second));
    floors.push_back(base + t * eg + 0.5 * t * t * eh);
  }
  return summarize(std::move(pts), floors, problem.exact_hessian() ? 2.9 : 2.5);
}

}  // namespace rmopt
