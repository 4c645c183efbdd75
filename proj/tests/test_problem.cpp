#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rmopt/cli.hpp"
#include "rmopt/derivative_check.hpp"
#include "rmopt/errors.hpp"
#include "rmopt/manifolds.hpp"
#include "rmopt/problem.hpp"
#include "test_util.hpp"

namespace rmopt {
namespace {

using testing::diag;
using testing::random_matrix;

Problem rayleigh(std::size_t n, const Matrix& a) {
  return Problem::autodiff(std::make_shared<Sphere>(n), cli::rayleigh_cost(a));
}

// ½xᵀAx on ℝⁿ with hand-written derivatives.
Problem euclidean_quadratic(const Matrix& a) {
  return Problem::user_supplied(
      std::make_shared<Euclidean>(a.rows()),
      [a](const Point& x) { return 0.5 * inner(x.matrix(), matmul(a, x.matrix())); },
      [a](const Point& x) { return Element(matmul(a, x.matrix())); },
      [a](const Point&, const Tangent& u) { return Element(matmul(a, u.matrix())); });
}

// Σx³ on ℝⁿ; the Hessian argument lets tests plant a wrong one.
Problem euclidean_cubic(std::size_t n, HessianFunction ehess) {
  auto cube_sum = [](const Point& x) {
    double s = 0;
    for (double v : x.matrix().values()) s += v * v * v;
    return s;
  };
  auto grad = [](const Point& x) {
    Matrix g = x.matrix();
    for (double& v : g.values()) v = 3 * v * v;
    return Element(g);
  };
  return Problem::user_supplied(std::make_shared<Euclidean>(n), cube_sum, grad, std::move(ehess));
}

Element cubic_hessian(const Point& x, const Tangent& u) {
  Matrix h = u.matrix();
  for (std::size_t i = 0; i < h.size(); ++i) h[i] *= 6 * x.matrix()[i];
  return Element(h);
}

// Every problem the cli ships, in a few configurations.
std::vector<cli::BuiltProblem> example_problems() {
  std::vector<cli::BuiltProblem> out;
  std::ostringstream sink;
  auto add = [&](cli::RunConfig c) { out.push_back(cli::build_problem(c, sink)); };
  cli::RunConfig c;
  c.n = 8;
  c.rank = 2;
  c.seed = 5;
  c.problem = "psd-approx";
  c.loss = cli::Loss::Huber;
  add(c);
  c.loss = cli::Loss::Frobenius;
  add(c);
  c.loss = cli::Loss::PNorm;
  c.pnorm = 3.0;
  add(c);
  c.pnorm = 1.5;
  add(c);
  c.problem = "rayleigh";
  add(c);
  c.problem = "procrustes";
  c.p = 3;
  add(c);
  c.problem = "subspace";
  add(c);
  return out;
}

TEST(RiemannianGradient, RayleighCriticalPoint) {
  Matrix e3(3, 1);
  e3(2, 0) = 1.0;
  const Problem p = rayleigh(3, diag({1, 2, 3}));
  EXPECT_LT(frobenius_norm(riemannian_gradient(p, e3)), 1e-10);
}

TEST(RiemannianGradient, PSDGlobalMinimum) {
  Rng rng(50);
  const Matrix y = random_matrix(6, 2, rng);
  const Matrix a = matmul_nt(y, y);
  const Problem p = Problem::autodiff(std::make_shared<PSDFixedRank>(6, 2),
                                      cli::psd_approx_cost(a, cli::Loss::Huber, 1.0, 1.0));
  EXPECT_EQ(cost_of(*p.expression())(y), 0.0);
  EXPECT_LT(frobenius_norm(riemannian_gradient(p, y)), 1e-9);
}

TEST(RiemannianGradient, ProvidersAgreeOnEveryExample) {
  Rng rng(51);
  for (const cli::BuiltProblem& b : example_problems()) {
    const Problem fd = Problem::finite_difference(b.problem.manifold_ptr(), cost_of(*b.problem.expression()));
    for (int trial = 0; trial < 20; ++trial) {
      const Point x = b.problem.manifold().rand(rng);
      const Tangent ga = riemannian_gradient(b.problem, x);
      const Tangent gf = riemannian_gradient(fd, x);
      EXPECT_LT(frobenius_norm(ga - gf) / std::max(1.0, frobenius_norm(ga)), 1e-5) << b.problem.manifold().name();
    }
  }
}

TEST(RiemannianGradient, OutputIsTangent) {
  Rng rng(52);
  for (const cli::BuiltProblem& b : example_problems()) {
    const Manifold& m = b.problem.manifold();
    for (int trial = 0; trial < 10; ++trial) {
      const Point x = m.rand(rng);
      const Tangent g = riemannian_gradient(b.problem, x);
      EXPECT_LT(frobenius_norm(m.proj(x, g) - g), 1e-10 * std::max(1.0, frobenius_norm(g)));
    }
  }
}

TEST(RiemannianGradient, NonFiniteGradientIsReported) {
  const Problem p = Problem::user_supplied(
      std::make_shared<Euclidean>(2), [](const Point&) { return 0.0; },
      [](const Point&) { return Element(Matrix{{NAN}, {0}}); });
  EXPECT_THROW(riemannian_gradient(p, Matrix(2, 1)), EvaluationError);
}

TEST(RiemannianHessVec, EuclideanQuadraticIsLinearMap) {
  Rng rng(53);
  const Matrix a = testing::random_spd(4, rng);
  const Problem user = euclidean_quadratic(a);
  const Problem autod = Problem::autodiff(std::make_shared<Euclidean>(4), [a](ad::Tape& t, std::span<const ad::Var> x) {
    return 0.5 * ad::matmul(ad::transpose(x[0]), ad::matmul(t.constant(a), x[0]));
  });
  const Problem fd = Problem::finite_difference(std::make_shared<Euclidean>(4), user.cost_function());
  const Matrix x = random_matrix(4, 1, rng);
  const Matrix u = random_matrix(4, 1, rng);
  const Matrix au = matmul(a, u);
  EXPECT_LT(frobenius_norm(riemannian_hess_vec(user, x, u).matrix() - au), 1e-14);
  EXPECT_LT(frobenius_norm(riemannian_hess_vec(autod, x, u).matrix() - au), 1e-12);
  EXPECT_LT(frobenius_norm(riemannian_hess_vec(fd, x, u).matrix() - au), 1e-6 * frobenius_norm(au));
}

TEST(RiemannianHessVec, LinearAndSymmetric) {
  Rng rng(54);
  for (const cli::BuiltProblem& b : example_problems()) {
    const Manifold& m = b.problem.manifold();
    for (int trial = 0; trial < 5; ++trial) {
      const Point x = m.rand(rng);
      const Tangent u = m.randvec(x, rng), v = m.randvec(x, rng);
      const Tangent hu = riemannian_hess_vec(b.problem, x, u);
      const Tangent hv = riemannian_hess_vec(b.problem, x, v);
      const Tangent hsum = riemannian_hess_vec(b.problem, x, 2.0 * u - 3.0 * v);
      EXPECT_LT(frobenius_norm(hsum - (2.0 * hu - 3.0 * hv)), 1e-5 * std::max(1.0, frobenius_norm(hsum)));
      const double l = m.inner(x, hu, v), r = m.inner(x, hv, u);
      EXPECT_NEAR(l, r, 1e-5 * std::max(1.0, std::abs(l)));
    }
  }
}

TEST(Evaluator, CachesPerPoint) {
  Rng rng(55);
  const Problem p = rayleigh(5, sym(random_matrix(5, 5, rng)));
  Evaluator ev(p);
  const Point x = p.manifold().rand(rng);
  const double c1 = ev.cost(x);
  const double c2 = ev.cost(x);
  EXPECT_EQ(c1, c2);
  EXPECT_EQ(ev.cost_evaluations(), 1u);
  ev.gradient(x);
  ev.gradient(x);
  EXPECT_EQ(ev.gradient_evaluations(), 1u);
  ev.hess_vec(x, p.manifold().randvec(x, rng));
  ev.hess_vec(x, p.manifold().randvec(x, rng));
  EXPECT_EQ(ev.gradient_evaluations(), 1u);
  EXPECT_EQ(ev.hessian_evaluations(), 2u);
  ev.cost(p.manifold().rand(rng));
  EXPECT_EQ(ev.cost_evaluations(), 2u);
}

TEST(Problem, UserHessianSymmetryIsCheckedOnConstruction) {
  const Matrix skewed{{1, 2}, {0, 1}};
  EXPECT_THROW(Problem::user_supplied(
                   std::make_shared<Euclidean>(2), [](const Point&) { return 0.0; },
                   [](const Point& x) { return x; },
                   [skewed](const Point&, const Tangent& u) { return Element(matmul(skewed, u.matrix())); }),
               ContractError);
  EXPECT_NO_THROW(euclidean_quadratic(diag({1, 2})));
}

TEST(CheckGradient, RayleighPasses) {
  Rng rng(56);
  const Problem p = rayleigh(10, sym(random_matrix(10, 10, rng)));
  const CheckReport r = check_gradient(p, p.manifold().rand(rng), rng);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.fitted_slope, 1.9);
  EXPECT_LE(r.fitted_slope, 2.1);
  EXPECT_EQ(r.slopes.size(), 51u);
  for (auto [t, res] : r.slopes) EXPECT_GT(res, 0.0);
}

TEST(CheckGradient, WrongGradientFails) {
  Rng rng(57);
  const Matrix a = sym(random_matrix(6, 6, rng));
  const Problem p = Problem::user_supplied(
      std::make_shared<Sphere>(6), [a](const Point& x) { return -inner(x.matrix(), matmul(a, x.matrix())); },
      [a](const Point& x) { return Element(-4.0 * matmul(a, x.matrix())); });
  const CheckReport r = check_gradient(p, p.manifold().rand(rng), rng);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.fitted_slope, 1.0, 0.1);
}

TEST(CheckGradient, EuclideanQuadraticIsExactlySecondOrder) {
  Rng rng(58);
  const Problem p = euclidean_quadratic(testing::random_spd(5, rng));
  const CheckReport r = check_gradient(p, random_matrix(5, 1, rng), rng);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.05);
}

TEST(CheckGradient, EveryShippedProblemPasses) {
  Rng rng(59);
  for (const cli::BuiltProblem& b : example_problems()) {
    const CheckReport r = check_gradient(b.problem, b.x0, rng);
    EXPECT_TRUE(r.pass) << b.problem.manifold().name() << " slope " << r.fitted_slope;
    const CheckReport h = check_hessian(b.problem, b.x0, rng);
    EXPECT_TRUE(h.pass) << b.problem.manifold().name() << " hessian slope " << h.fitted_slope;
  }
}

TEST(CheckHessian, CubicPasses) {
  Rng rng(60);
  const Problem p = euclidean_cubic(5, cubic_hessian);
  const CheckReport r = check_hessian(p, random_matrix(5, 1, rng), rng);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.fitted_slope, 3.0, 0.1);
}

TEST(CheckHessian, QuadraticIsExact) {
  Rng rng(61);
  const Problem p = euclidean_quadratic(testing::random_spd(5, rng));
  const CheckReport r = check_hessian(p, random_matrix(5, 1, rng), rng);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.exact);
}

TEST(CheckHessian, WrongHessianFails) {
  Rng rng(62);
  const Problem p = euclidean_cubic(5, [](const Point&, const Tangent& u) { return u; });
  const CheckReport r = check_hessian(p, random_matrix(5, 1, rng, 1.0, 2.0), rng);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.fitted_slope, 2.0, 0.1);
}

TEST(CheckHessian, FiniteDifferenceProviderUsesLowerThreshold) {
  Rng rng(63);
  const Problem p = Problem::finite_difference(
      std::make_shared<Sphere>(5), cost_of(cli::rayleigh_cost(sym(random_matrix(5, 5, rng)))));
  const CheckReport r = check_hessian(p, p.manifold().rand(rng), rng);
  EXPECT_EQ(r.threshold, 2.5);
  EXPECT_TRUE(r.pass) << r.fitted_slope;
}

TEST(CheckHessian, CostOnlyProviderOnSmoothLoss) {
  // The difference-based gradient leaves a t-linear residual tail; the check
  // has to see past it to the third-order regime.
  cli::RunConfig c;
  c.problem = "psd-approx";
  c.seed = 11;
  std::ostringstream sink;
  const cli::BuiltProblem b = cli::build_problem(c, sink);
  const Problem fd = Problem::finite_difference(b.problem.manifold_ptr(), b.problem.cost_function());
  Rng rng(64);
  for (int trial = 0; trial < 5; ++trial) {
    const CheckReport g = check_gradient(fd, b.problem.manifold().rand(rng), rng);
    EXPECT_TRUE(g.pass) << g.fitted_slope;
    const CheckReport h = check_hessian(fd, b.problem.manifold().rand(rng), rng);
    EXPECT_TRUE(h.pass) << h.fitted_slope;
  }
}

}  // namespace
}  // namespace rmopt
