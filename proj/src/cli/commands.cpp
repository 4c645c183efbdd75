#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmopt/cli.hpp"
#include "rmopt/derivative_check.hpp"
#include "rmopt/errors.hpp"

namespace rmopt::cli {
namespace {

using json = nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

StoppingCriteria criteria_from(const RunConfig& config) {
  StoppingCriteria c;
  c.max_iterations = config.maxiter;
  c.grad_tolerance = config.tol;
  c.max_time_s = config.maxtime;
  c.validate();
  return c;
}

// Derivative-free solvers draw from their own stream so that adding one does
// not perturb the problem data or x0.
Rng solver_rng(const RunConfig& config) { return Rng(config.seed ^ 0x9e3779b97f4a7c15ULL); }

std::string loss_name(const RunConfig& config) {
  switch (config.loss) {
    case Loss::Huber: return "huber";
    case Loss::Frobenius: return "frobenius";
    case Loss::PNorm: return "pnorm";
  }
  return "unknown";
}

}  // namespace

std::string log_line(const IterationRecord& record, bool with_time) {
  // Fixed key order keeps lines byte-stable.
  nlohmann::ordered_json j;
  j["iter"] = record.iteration;
  j["cost"] = number_or_null(record.cost);
  j["grad_norm"] = number_or_null(record.grad_norm);
  j["step"] = number_or_null(record.step);
  j["time_s"] = with_time ? record.elapsed_s : 0.0;
  return j.dump();
}

bool solver_applicable(const std::string& solver, const Manifold& manifold) {
  if (solver == "neldermead") return manifold.has_dist();
  return std::find(kSolverIds.begin(), kSolverIds.end(), solver) != kSolverIds.end();
}

OptimizationResult run_solver(const std::string& solver, const Problem& problem, const Point& x0,
                              const StoppingCriteria& criteria, Rng& rng) {
  if (solver == "steepestdescent") return steepest_descent(problem, x0, criteria);
  if (solver == "conjugategradient") return conjugate_gradient(problem, x0, criteria);
  if (solver == "trustregions") return trust_regions(problem, x0, criteria);
  if (solver == "neldermead") return nelder_mead(problem, criteria, rng);
  if (solver == "particleswarm") return particle_swarm(problem, criteria, rng);
  throw InputError("unknown solver '" + solver + "'");
}

int exit_code_for(StopReason reason) {
  switch (reason) {
    case StopReason::GradTolerance:
    case StopReason::Stagnation:
    case StopReason::MinStepSize:
      return 0;
    case StopReason::MaxIterations:
    case StopReason::MaxTime:
      return 2;
  }
  return 1;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  BuiltProblem built = build_problem(config, err);
  const StoppingCriteria criteria = criteria_from(config);
  Rng rng = solver_rng(config);

  const auto start = std::chrono::steady_clock::now();
  OptimizationResult result = run_solver(config.solver, built.problem, built.x0, criteria, rng);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (config.log_path) {
    std::ofstream log(*config.log_path);
    if (!log) throw InputError("cannot write log file " + *config.log_path);
    for (const IterationRecord& r : result.log) log << log_line(r, config.verbose) << '\n';
  }
  if (config.out_path) {
    if (result.point.num_parts() != 1) throw InputError("--out supports single-matrix points only");
    write_matrix_csv(result.point.matrix(), *config.out_path);
  }

  nlohmann::ordered_json summary;
  summary["problem"] = config.problem;
  summary["solver"] = config.solver;
  summary["manifold"] = built.problem.manifold().name();
  if (config.problem == "psd-approx") summary["loss"] = loss_name(config);
  summary["seed"] = config.seed;
  summary["iterations"] = result.iterations();
  summary["cost"] = number_or_null(result.cost);
  summary["grad_norm"] = number_or_null(result.grad_norm);
  summary["stop_reason"] = std::string(to_string(result.stop_reason));
  summary["time_s"] = wall;
  out << summary.dump() << '\n';

  if (config.verbose) {
    for (const IterationRecord& r : result.log) err << log_line(r, true) << '\n';
  }
  return exit_code_for(result.stop_reason);
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  BuiltProblem built = build_problem(config, err);
  const Problem& problem = built.problem;
  Rng rng(config.seed + 1);
  const Point x = problem.manifold().rand(rng);

  const CheckReport grad = check_gradient(problem, x, rng);
  const CheckReport hess = check_hessian(problem, x, rng);

  auto print = [&](const char* what, const CheckReport& r) {
    out << what << " slope " << std::fixed << std::setprecision(2) << r.fitted_slope << " (threshold "
        << r.threshold << ") " << (r.pass ? "PASS" : "FAIL") << (r.exact ? " exact" : "") << '\n';
    out.unsetf(std::ios::floatfield);
    if (config.verbose) {
      for (const auto& [t, res] : r.slopes) err << what << " t=" << t << " residual=" << res << '\n';
    }
  };
  print("gradient", grad);
  print("hessian", hess);
  return grad.pass && hess.pass ? 0 : 1;
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  BuiltProblem built = build_problem(config, err);
  const StoppingCriteria criteria = criteria_from(config);

  out << "solver,iterations,final_cost,final_grad_norm,wall_time_s\n";
  out << std::setprecision(17);
  for (const std::string& solver : kSolverIds) {
    if (!solver_applicable(solver, built.problem.manifold())) continue;
    Rng rng = solver_rng(config);
    const auto start = std::chrono::steady_clock::now();
    const OptimizationResult r = run_solver(solver, built.problem, built.x0, criteria, rng);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << solver << ',' << r.iterations() << ',' << r.cost << ',';
    if (std::isfinite(r.grad_norm)) out << r.grad_norm;
    out << ',' << wall << '\n';
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riemannian optimization on matrix manifolds with automatic differentiation", "rmopt"};
  app.require_subcommand(1);

  RunConfig config;
  std::string loss = "huber";
  std::string matrix, outp, logp;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--problem", config.problem, "psd-approx | rayleigh | procrustes | subspace")->required();
    sub->add_option("--solver", config.solver,
                    "steepestdescent | conjugategradient | trustregions | neldermead | particleswarm");
    sub->add_option("--n", config.n, "ambient size n");
    sub->add_option("--rank", config.rank, "rank k for psd-approx");
    sub->add_option("--p", config.p, "number of columns for procrustes/subspace");
    sub->add_option("--loss", loss, "huber | frobenius | pnorm (psd-approx)");
    sub->add_option("--pnorm", config.pnorm, "exponent for --loss pnorm");
    sub->add_option("--delta", config.delta, "pseudo-Huber delta (> 0)");
    sub->add_option("--matrix", matrix, "CSV file holding the data matrix A");
    sub->add_option("--out", outp, "CSV file for the final point");
    sub->add_option("--log", logp, "JSON Lines convergence log");
    sub->add_option("--seed", config.seed, "RNG seed");
    sub->add_option("--maxiter", config.maxiter, "iteration limit");
    sub->add_option("--tol", config.tol, "gradient-norm tolerance");
    sub->add_option("--maxtime", config.maxtime, "time limit in seconds");
    sub->add_flag("--verbose", config.verbose, "wall-clock times in the log; per-iteration output on stderr");
  };
  CLI::App* solve = app.add_subcommand("solve", "run a solver and write the convergence log");
  CLI::App* check = app.add_subcommand("check", "numerically verify gradient and Hessian");
  CLI::App* bench = app.add_subcommand("bench", "run every applicable solver on one instance");
  for (CLI::App* sub : {solve, check, bench}) add_flags(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  CLI::App* active = app.get_subcommands().front();
  if (std::find(kProblemIds.begin(), kProblemIds.end(), config.problem) == kProblemIds.end()) {
    err << "error: unknown problem '" << config.problem << "'\n" << active->help();
    return 1;
  }
  if (std::find(kSolverIds.begin(), kSolverIds.end(), config.solver) == kSolverIds.end()) {
    err << "error: unknown solver '" << config.solver << "'\n" << active->help();
    return 1;
  }
  if (loss == "huber") {
    config.loss = Loss::Huber;
  } else if (loss == "frobenius") {
    config.loss = Loss::Frobenius;
  } else if (loss == "pnorm") {
    config.loss = Loss::PNorm;
  } else {
    err << "error: unknown loss '" << loss << "'\n" << active->help();
    return 1;
  }
  if (!matrix.empty()) config.matrix_path = matrix;
  if (!outp.empty()) config.out_path = outp;
  if (!logp.empty()) config.log_path = logp;

  try {
    if (active == solve) return cmd_solve(config, out, err);
    if (active == check) return cmd_check(config, out, err);
    return cmd_bench(config, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rmopt::cli
