#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rmopt/autodiff.hpp"
#include "rmopt/errors.hpp"
#include "rmopt/problem.hpp"
#include "rmopt/solvers.hpp"

namespace rmopt::cli {

/// Bad command-line input or input file; maps to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

enum class Loss { Huber, Frobenius, PNorm };

struct RunConfig {
  std::string problem;
  std::string solver = "trustregions";
  std::size_t n = 10;
  std::size_t rank = 3;
  std::size_t p = 3;
  Loss loss = Loss::Huber;
  double pnorm = 1.0;
  double delta = 1.0;
  std::uint64_t seed = 0;
  std::size_t maxiter = 1000;
  double tol = 1e-6;
  double maxtime = 3600.0;
  std::optional<std::string> matrix_path;
  std::optional<std::string> out_path;
  std::optional<std::string> log_path;
  bool verbose = false;
};

inline const std::vector<std::string> kProblemIds = {"psd-approx", "rayleigh", "procrustes", "subspace"};
inline const std::vector<std::string> kSolverIds = {"steepestdescent", "conjugategradient", "trustregions",
                                                    "neldermead", "particleswarm"};

// ---- losses on a residual R = S − A ----

/// Σ_ij √(r_ij² + δ²) − δ
ad::Var pseudo_huber_loss(const ad::Var& residual, double delta);
/// ‖R‖_F²
ad::Var frobenius_loss(const ad::Var& residual);
/// Σ_ij (r_ij² + δ_p²)^{p/2}, with δ_p = 1e-8 when p < 2 and 0 otherwise.
ad::Var pnorm_loss(const ad::Var& residual, double p);
inline constexpr double kPNormSmoothing = 1e-8;

ad::Var apply_loss(const ad::Var& residual, Loss loss, double delta, double p);

// ---- built-in problems ----

struct BuiltProblem {
  Problem problem;
  /// Data matrix A (every built-in problem has one).
  Matrix data;
  /// Known minimizer used to generate the data, when there is one.
  std::optional<Matrix> planted;
  /// Seeded starting point.
  Point x0;
};

/// Builds the configured problem. Data is drawn from Rng(seed) first, then
/// x0. Writes warnings (e.g. symmetrization) to `warn`.
BuiltProblem build_problem(const RunConfig& config, std::ostream& warn);

/// Cost expression of the low-rank PSD approximation f(Y) = loss(YYᵀ − A).
ad::Expression psd_approx_cost(const Matrix& a, Loss loss, double delta, double p);
ad::Expression rayleigh_cost(const Matrix& a);
ad::Expression procrustes_cost(const Matrix& a, const Matrix& b);
ad::Expression subspace_cost(const Matrix& a);

/// Seeded random symmetric matrix (G + Gᵀ)/2 with standard normal G.
Matrix random_symmetric(std::size_t n, Rng& rng);

// ---- matrix files ----

/// Plain CSV: one row per line, comma separated, no header. Throws
/// InputError with line/column diagnostics.
Matrix read_matrix_csv(const std::string& path);
Matrix parse_matrix_csv(std::istream& in, const std::string& source);
void write_matrix_csv(const Matrix& m, const std::string& path);
void write_matrix_csv(const Matrix& m, std::ostream& out);

// ---- commands ----

/// One IterationRecord as a single-line JSON object with keys
/// iter, cost, grad_norm (null when NaN), step, time_s.
std::string log_line(const IterationRecord& record, bool with_time);

OptimizationResult run_solver(const std::string& solver, const Problem& problem, const Point& x0,
                              const StoppingCriteria& criteria, Rng& rng);
bool solver_applicable(const std::string& solver, const Manifold& manifold);

int exit_code_for(StopReason reason);

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rmopt::cli
