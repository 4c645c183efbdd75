#include <cmath>
#include <ostream>

#include "rmopt/cli.hpp"
#include "rmopt/errors.hpp"
#include "rmopt/manifolds.hpp"

namespace rmopt::cli {

ad::Var pseudo_huber_loss(const ad::Var& residual, double delta) {
  return ad::sum(ad::smooth_abs(residual, delta) - delta);
}

ad::Var frobenius_loss(const ad::Var& residual) { return ad::frobenius_norm_sq(residual); }

ad::Var pnorm_loss(const ad::Var& residual, double p) {
  const ad::Var sq = ad::square(residual);
  const ad::Var base = p < 2.0 ? sq + kPNormSmoothing * kPNormSmoothing : sq;
  return ad::sum(ad::pow(base, 0.5 * p));
}

ad::Var apply_loss(const ad::Var& residual, Loss loss, double delta, double p) {
  switch (loss) {
    case Loss::Huber: return pseudo_huber_loss(residual, delta);
    case Loss::Frobenius: return frobenius_loss(residual);
    case Loss::PNorm: return pnorm_loss(residual, p);
  }
  throw ContractError("unknown loss");
}

ad::Expression psd_approx_cost(const Matrix& a, Loss loss, double delta, double p) {
  return [a, loss, delta, p](ad::Tape& tape, std::span<const ad::Var> x) {
    const ad::Var& y = x[0];
    const ad::Var s = ad::matmul(y, ad::transpose(y));
    return apply_loss(s - tape.constant(a), loss, delta, p);
  };
}

ad::Expression rayleigh_cost(const Matrix& a) {
  return [a](ad::Tape& tape, std::span<const ad::Var> x) {
    return -ad::matmul(ad::transpose(x[0]), ad::matmul(tape.constant(a), x[0]));
  };
}

ad::Expression procrustes_cost(const Matrix& a, const Matrix& b) {
  return [a, b](ad::Tape& tape, std::span<const ad::Var> x) {
    return ad::frobenius_norm_sq(ad::matmul(tape.constant(a), x[0]) - tape.constant(b));
  };
}

ad::Expression subspace_cost(const Matrix& a) {
  return [a](ad::Tape& tape, std::span<const ad::Var> x) {
    return -ad::trace(ad::matmul(ad::transpose(x[0]), ad::matmul(tape.constant(a), x[0])));
  };
}

Matrix random_symmetric(std::size_t n, Rng& rng) { return sym(gaussian(n, n, rng)); }

namespace {

Matrix load_square(const RunConfig& config, std::ostream& warn, bool symmetrize) {
  Matrix a = read_matrix_csv(*config.matrix_path);
  if (a.rows() != a.cols()) {
    throw InputError("matrix " + *config.matrix_path + " must be square, got " + a.shape_string());
  }
  if (symmetrize) {
    const double asym = frobenius_norm(a - transpose(a));
    if (asym > 1e-12 * std::max(1.0, frobenius_norm(a))) {
      warn << "warning: input matrix is not symmetric (||A - A^T||_F = " << asym
           << "); using (A + A^T)/2\n";
      a = sym(a);
    }
  }
  return a;
}

std::size_t size_from(const RunConfig& config, const Matrix& a) {
  return config.matrix_path ? a.rows() : config.n;
}

}  // namespace

BuiltProblem build_problem(const RunConfig& config, std::ostream& warn) {
  Rng rng(config.seed);
  const auto& id = config.problem;

  if (id == "psd-approx") {
    std::optional<Matrix> planted;
    Matrix a;
    if (config.matrix_path) {
      a = load_square(config, warn, true);
    }
    const std::size_t n = size_from(config, a);
    const std::size_t k = config.rank;
    if (k == 0 || k >= n) throw InputError("rank must satisfy k < n (got k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    if (config.loss == Loss::Huber && !(config.delta > 0.0)) throw InputError("delta must be positive for the huber loss");
    if (config.loss == Loss::PNorm && !(config.pnorm > 0.0)) throw InputError("pnorm must be positive");
    if (!config.matrix_path) {
      planted = gaussian(n, k, rng);
      a = matmul_nt(*planted, *planted);
    }
    auto manifold = std::make_shared<PSDFixedRank>(n, k);
    Problem problem = Problem::autodiff(manifold, psd_approx_cost(a, config.loss, config.delta, config.pnorm));
    Point x0 = manifold->rand(rng);
    return {std::move(problem), std::move(a), std::move(planted), std::move(x0)};
  }

  if (id == "rayleigh") {
    Matrix a = config.matrix_path ? load_square(config, warn, true) : random_symmetric(config.n, rng);
    if (a.rows() < 2) throw InputError("rayleigh needs n >= 2");
    auto manifold = std::make_shared<Sphere>(a.rows());
    Problem problem = Problem::autodiff(manifold, rayleigh_cost(a));
    Point x0 = manifold->rand(rng);
    return {std::move(problem), std::move(a), std::nullopt, std::move(x0)};
  }

  if (id == "procrustes") {
    Matrix a = config.matrix_path ? load_square(config, warn, false) : gaussian(config.n, config.n, rng);
    const std::size_t n = a.rows();
    if (config.p == 0 || config.p > n) throw InputError("procrustes needs 1 <= p <= n");
    auto manifold = std::make_shared<Stiefel>(n, config.p);
    Matrix planted = manifold->rand(rng).matrix();
    Matrix b = matmul(a, planted);
    Problem problem = Problem::autodiff(manifold, procrustes_cost(a, b));
    Point x0 = manifold->rand(rng);
    return {std::move(problem), std::move(a), std::move(planted), std::move(x0)};
  }

  if (id == "subspace") {
    Matrix a = config.matrix_path ? load_square(config, warn, true) : random_symmetric(config.n, rng);
    if (config.p == 0 || config.p >= a.rows()) throw InputError("subspace needs 1 <= p < n");
    auto manifold = std::make_shared<Grassmann>(a.rows(), config.p);
    Problem problem = Problem::autodiff(manifold, subspace_cost(a));
    Point x0 = manifold->rand(rng);
    return {std::move(problem), std::move(a), std::nullopt, std::move(x0)};
  }

  throw InputError("unknown problem '" + id + "'");
}

}  // namespace rmopt::cli
