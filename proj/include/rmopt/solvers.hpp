#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "rmopt/problem.hpp"

namespace rmopt {

struct StoppingCriteria {
  std::size_t max_iterations = 1000;
  double grad_tolerance = 1e-6;
  double min_step_size = 1e-10;
  double max_time_s = 3600.0;
  /// Stop when an iteration lowers the cost by less than this; 0 disables.
  double cost_stagnation_tol = 0.0;

  /// Throws ContractError on negative values.
  void validate() const;
};

enum class StopReason { GradTolerance, MaxIterations, MinStepSize, MaxTime, Stagnation };

std::string_view to_string(StopReason reason);

struct IterationRecord {
  std::size_t iteration = 0;
  double cost = 0.0;
  /// NaN for derivative-free solvers.
  double grad_norm = 0.0;
  /// Accepted step length, trust-region radius, or simplex/swarm spread.
  double step = 0.0;
  double elapsed_s = 0.0;
  /// Truncated-CG iterations (trust regions only).
  std::size_t inner_iterations = 0;
};

struct OptimizationResult {
  Point point;
  double cost = 0.0;
  double grad_norm = 0.0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::vector<IterationRecord> log;
  std::size_t iterations() const noexcept { return log.empty() ? 0 : log.back().iteration; }
};

// ---- first order ----

/// Armijo sufficient-decrease constant and backtracking contraction.
inline constexpr double kArmijoC1 = 1e-4;
inline constexpr double kBacktrackContraction = 0.5;
inline constexpr int kMaxBacktracks = 25;
/// Initial trial step is the previous accepted step times this.
inline constexpr double kStepGrowth = 2.0;

OptimizationResult steepest_descent(const Problem& problem, const Point& x0,
                                    const StoppingCriteria& criteria = {});

/// Polak–Ribière+ nonlinear CG with projection transport.
OptimizationResult conjugate_gradient(const Problem& problem, const Point& x0,
                                      const StoppingCriteria& criteria = {});

// ---- second order ----

inline constexpr double kTcgTheta = 1.0;
inline constexpr double kTcgKappa = 0.1;
inline constexpr double kRhoAccept = 0.1;
inline constexpr double kRhoShrink = 0.25;
inline constexpr double kRhoExpand = 0.75;
inline constexpr double kRadiusShrink = 0.25;
inline constexpr double kRadiusExpand = 2.0;

struct TrustRegionParams {
  /// Initial radius; <= 0 selects typical_dist/8.
  double initial_radius = 0.0;
  /// Radius cap; <= 0 selects typical_dist.
  double max_radius = 0.0;
  /// tCG iteration cap; 0 selects the manifold dimension.
  std::size_t max_inner_iterations = 0;
};

enum class TcgStop { NegativeCurvature, ExceededRadius, ResidualSmall, MaxInner, ModelIncrease };

struct TcgResult {
  Tangent step;
  Tangent hess_step;
  std::size_t iterations = 0;
  TcgStop stop = TcgStop::MaxInner;
  bool hit_boundary = false;
  /// Norm of every iterate including the final step, in order.
  std::vector<double> iterate_norms;
};

/// Steihaug–Toint truncated CG on the model ⟨g,η⟩ + ½⟨Hη,η⟩ within ‖η‖ ≤ radius.
TcgResult truncated_cg(Evaluator& ev, const Point& x, const Tangent& grad, double radius,
                       std::size_t max_iterations, double theta = kTcgTheta, double kappa = kTcgKappa);

OptimizationResult trust_regions(const Problem& problem, const Point& x0,
                                 const StoppingCriteria& criteria = {},
                                 const TrustRegionParams& params = {});

// ---- derivative free ----

/// Requires a manifold with dist and pairmean; the simplex has dim+1 random
/// vertices drawn from rng.
OptimizationResult nelder_mead(const Problem& problem, const StoppingCriteria& criteria, Rng& rng);

struct SwarmParams {
  std::size_t population = 40;
  double inertia = 0.6;
  double cognitive = 1.4;
  double social = 1.4;
  /// Initial velocities are randvec scaled by this times typical_dist.
  double initial_velocity_scale = 0.1;
};

OptimizationResult particle_swarm(const Problem& problem, const StoppingCriteria& criteria, Rng& rng,
                                  const SwarmParams& params = {});

}  // namespace rmopt
