#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "rmopt/autodiff.hpp"
#include "rmopt/errors.hpp"
#include "test_util.hpp"

namespace rmopt {
namespace {

using ad::Expression;
using ad::HessVecMode;
using ad::Tape;
using ad::Var;
using testing::diag;
using testing::fd_gradient;
using testing::random_matrix;

double plain_eval(const Expression& f, const std::vector<Matrix>& x) { return ad::evaluate(f, x); }

double max_rel(const std::vector<Matrix>& got, const std::vector<Matrix>& want) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += inner(got[i] - want[i], got[i] - want[i]);
    den += inner(want[i], want[i]);
  }
  return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

// Pseudo-Huber written directly as doubles, for comparison.
double huber_oracle(const Matrix& r, double delta) {
  double s = 0;
  for (double v : r.values()) s += std::sqrt(v * v + delta * delta) - delta;
  return s;
}

Var huber(const Var& r, double delta) { return ad::sum(ad::smooth_abs(r, delta) - delta); }

TEST(Autodiff, EvaluateSum) {
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::sum(x[0]); };
  const std::vector<Matrix> x{Matrix{{1, 2}, {3, 4}}};
  EXPECT_EQ(ad::evaluate(f, x), 10.0);
}

TEST(Autodiff, HuberValues) {
  const Matrix a{{1, 2}, {2, 5}};
  const Expression f = [a](Tape& t, std::span<const Var> x) { return huber(x[0] - t.constant(a), 1.0); };
  EXPECT_EQ(ad::evaluate(f, std::vector<Matrix>{a}), 0.0);
  const Expression g = [](Tape& t, std::span<const Var> x) { return huber(x[0] - t.constant(0.0), 1.0); };
  EXPECT_NEAR(ad::evaluate(g, std::vector<Matrix>{Matrix{{1}}}), std::sqrt(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(ad::evaluate(g, std::vector<Matrix>{Matrix{{1}}}), huber_oracle(Matrix{{1}}, 1.0), 1e-15);
}

TEST(Autodiff, GradientOfSquaredNorm) {
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::matmul(ad::transpose(x[0]), x[0]); };
  const Matrix x{{1}, {-2}, {3}};
  const ad::GradResult r = ad::gradient(f, std::vector<Matrix>{x});
  EXPECT_EQ(r.value, 14.0);
  EXPECT_LT(frobenius_norm(r.grads[0] - 2.0 * x), 1e-15);
}

TEST(Autodiff, HuberGradient) {
  const Expression f = [](Tape&, std::span<const Var> x) { return huber(x[0], 1.0); };
  const ad::GradResult r = ad::gradient(f, std::vector<Matrix>{Matrix{{1}}});
  EXPECT_NEAR(r.grads[0][0], 1.0 / std::sqrt(2.0), 1e-15);
  const auto fd = fd_gradient([&](const std::vector<Matrix>& x) { return huber_oracle(x[0], 1.0); },
                              {Matrix{{1}}});
  EXPECT_NEAR(r.grads[0][0], fd[0][0], 1e-8);
}

TEST(Autodiff, TraceProductGradientIsTranspose) {
  Rng rng(20);
  const Matrix a = random_matrix(3, 3, rng);
  const Expression f = [a](Tape& t, std::span<const Var> x) { return ad::trace(ad::matmul(t.constant(a), x[0])); };
  const Matrix x = random_matrix(3, 3, rng);
  const ad::GradResult r = ad::gradient(f, std::vector<Matrix>{x});
  EXPECT_LT(frobenius_norm(r.grads[0] - transpose(a)), 1e-14);
  const auto fd = fd_gradient([&](const std::vector<Matrix>& v) { return plain_eval(f, v); }, {x});
  EXPECT_LT(frobenius_norm(r.grads[0] - fd[0]), 1e-8);
}

class HessVecModes : public ::testing::TestWithParam<HessVecMode> {};

TEST_P(HessVecModes, HalfSquaredNormIsIdentity) {
  const Expression f = [](Tape&, std::span<const Var> x) { return 0.5 * ad::frobenius_norm_sq(x[0]); };
  Rng rng(21);
  const Matrix x = random_matrix(4, 1, rng);
  const Matrix d = random_matrix(4, 1, rng);
  const auto hv = ad::hess_vec(f, std::vector<Matrix>{x}, std::vector<Matrix>{d}, GetParam());
  EXPECT_LT(frobenius_norm(hv[0] - d), 1e-6);
}

TEST_P(HessVecModes, DiagonalQuadratic) {
  const Matrix a = diag({1, 2, 3});
  const Expression f = [a](Tape& t, std::span<const Var> x) {
    return 0.5 * ad::matmul(ad::transpose(x[0]), ad::matmul(t.constant(a), x[0]));
  };
  const auto hv = ad::hess_vec(f, std::vector<Matrix>{Matrix(3, 1)}, std::vector<Matrix>{Matrix(3, 1, 1.0)},
                               GetParam());
  EXPECT_LT(frobenius_norm(hv[0] - Matrix{{1}, {2}, {3}}), 1e-6);
}

TEST_P(HessVecModes, HuberLossMatchesDenseOracle) {
  Rng rng(22);
  const Matrix a = sym(random_matrix(3, 3, rng));
  const Expression f = [a](Tape& t, std::span<const Var> y) {
    return huber(ad::matmul(y[0], ad::transpose(y[0])) - t.constant(a), 1.0);
  };
  const Matrix y = random_matrix(3, 3, rng);
  const Matrix d = random_matrix(3, 3, rng);
  const auto hv = ad::hess_vec(f, std::vector<Matrix>{y}, std::vector<Matrix>{d}, GetParam());
  // Oracle: directional central difference of a finite-difference gradient.
  const auto grad_at = [&](const Matrix& p) {
    return fd_gradient([&](const std::vector<Matrix>& v) { return plain_eval(f, v); }, {p}, 1e-5)[0];
  };
  const double h = 1e-4;
  const Matrix oracle = (grad_at(y + h * d) - grad_at(y - h * d)) * (1.0 / (2.0 * h));
  EXPECT_LT(frobenius_norm(hv[0] - oracle) / frobenius_norm(oracle), 1e-4);
}

TEST_P(HessVecModes, Symmetry) {
  Rng rng(23);
  const Matrix a = sym(random_matrix(4, 4, rng));
  const Expression f = [a](Tape& t, std::span<const Var> y) {
    return huber(ad::matmul(y[0], ad::transpose(y[0])) - t.constant(a), 0.5) + ad::sum(ad::exp(0.3 * y[0]));
  };
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Matrix> y{random_matrix(4, 2, rng)};
    const std::vector<Matrix> d1{random_matrix(4, 2, rng)};
    const std::vector<Matrix> d2{random_matrix(4, 2, rng)};
    const auto h1 = ad::hess_vec(f, y, d1, GetParam());
    const auto h2 = ad::hess_vec(f, y, d2, GetParam());
    const double l = inner(h1[0], d2[0]);
    const double r = inner(h2[0], d1[0]);
    EXPECT_NEAR(l, r, 1e-5 * std::max(1.0, std::abs(l)));
  }
}

INSTANTIATE_TEST_SUITE_P(BothModes, HessVecModes,
                         ::testing::Values(HessVecMode::FiniteDifference, HessVecMode::ForwardOverReverse));

// One case per primitive: a scalar expression exercising the op, plus an
// input generator that respects its domain.
struct OpCase {
  std::string name;
  std::size_t arity;
  std::function<Var(Tape&, std::span<const Var>, const Matrix& w)> body;
  bool positive;
};

std::vector<OpCase> op_cases() {
  using S = std::span<const Var>;
  auto weighted = [](Tape& t, const Var& v, const Matrix& w) { return ad::sum(t.constant(w) * v); };
  return {
      {"add", 2, [=](Tape& t, S x, const Matrix& w) { return weighted(t, x[0] + x[1], w); }, false},
      {"sub", 2, [=](Tape& t, S x, const Matrix& w) { return weighted(t, x[0] - x[1], w); }, false},
      {"mul", 2, [=](Tape& t, S x, const Matrix& w) { return weighted(t, x[0] * x[1], w); }, false},
      {"div", 2, [=](Tape& t, S x, const Matrix& w) { return weighted(t, x[0] / x[1], w); }, true},
      {"scale", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, 2.5 * x[0], w); }, false},
      {"matmul", 2,
       [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::matmul(x[0], x[1]), w); }, false},
      {"transpose", 1,
       [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::transpose(x[0]) * x[0], w); }, false},
      {"trace", 1, [=](Tape&, S x, const Matrix&) { return ad::square(ad::trace(x[0])); }, false},
      {"sum", 1, [=](Tape&, S x, const Matrix&) { return ad::square(ad::sum(x[0])); }, false},
      {"square", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::square(x[0]), w); }, false},
      {"sqrt", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::sqrt(x[0]), w); }, true},
      {"smooth_abs", 1,
       [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::smooth_abs(x[0], 0.3), w); }, false},
      {"pow", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::pow(x[0], 2.7), w); }, true},
      {"exp", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::exp(x[0]), w); }, false},
      {"log", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, ad::log(x[0]), w); }, true},
      {"neg", 1, [=](Tape& t, S x, const Matrix& w) { return weighted(t, -(x[0] * x[0]), w); }, false},
      {"frobenius_sq", 1,
       [=](Tape&, S x, const Matrix&) { return ad::square(ad::frobenius_norm_sq(x[0])); }, false},
      {"reshape", 1,
       [=](Tape& t, S x, const Matrix& w) {
         return weighted(t, ad::reshape(ad::reshape(x[0], 1, 9) * ad::reshape(x[0], 1, 9), 3, 3), w);
       },
       false},
      {"scalar_broadcast", 2,
       [=](Tape& t, S x, const Matrix& w) {
         return weighted(t, x[0] * ad::trace(x[1]) + ad::sum(x[1]), w);
       },
       false},
  };
}

TEST(AutodiffOps, AdjointsMatchCentralDifferences) {
  Rng rng(24);
  for (const OpCase& c : op_cases()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix w = random_matrix(3, 3, rng);
      const Expression f = [&c, w](Tape& t, std::span<const Var> x) { return c.body(t, x, w); };
      std::vector<Matrix> x;
      for (std::size_t i = 0; i < c.arity; ++i)
        x.push_back(c.positive ? random_matrix(3, 3, rng, 0.5, 2.0) : random_matrix(3, 3, rng));
      const ad::GradResult r = ad::gradient(f, x);
      const auto fd = fd_gradient([&](const std::vector<Matrix>& v) { return plain_eval(f, v); }, x);
      EXPECT_LT(max_rel(r.grads, fd), 1e-6) << c.name;
    }
  }
}

TEST(AutodiffOps, ExactHessVecMatchesDifferenceOfGradients) {
  Rng rng(25);
  for (const OpCase& c : op_cases()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix w = random_matrix(3, 3, rng);
      const Expression f = [&c, w](Tape& t, std::span<const Var> x) { return c.body(t, x, w); };
      std::vector<Matrix> x, d;
      for (std::size_t i = 0; i < c.arity; ++i) {
        x.push_back(c.positive ? random_matrix(3, 3, rng, 0.5, 2.0) : random_matrix(3, 3, rng));
        d.push_back(random_matrix(3, 3, rng));
      }
      const auto exact = ad::hess_vec(f, x, d, HessVecMode::ForwardOverReverse);
      const auto fd = ad::hess_vec(f, x, d, HessVecMode::FiniteDifference);
      EXPECT_LT(max_rel(exact, fd), 1e-5) << c.name;
    }
  }
}

TEST(Autodiff, TaylorRemainderIsSecondOrder) {
  Rng rng(26);
  const Matrix a = sym(random_matrix(4, 4, rng));
  const Expression f = [a](Tape& t, std::span<const Var> y) {
    return huber(ad::matmul(y[0], ad::transpose(y[0])) - t.constant(a), 1.0);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix y = random_matrix(4, 2, rng);
    const Matrix d = random_matrix(4, 2, rng);
    const ad::GradResult r = ad::gradient(f, std::vector<Matrix>{y});
    const double slope_term = inner(r.grads[0], d);
    std::vector<std::pair<double, double>> pts;
    for (double t = 1e-1; t >= 1e-4; t /= 2.0) {
      const double rem = std::abs(ad::evaluate(f, std::vector<Matrix>{y + t * d}) - r.value - t * slope_term);
      pts.emplace_back(t, rem);
    }
    EXPECT_GE(testing::loglog_fit(pts), 1.95);
  }
}

TEST(Autodiff, GradientIsLinearInTheCost) {
  Rng rng(27);
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::sum(ad::exp(x[0])); };
  const Expression g = [](Tape&, std::span<const Var> x) { return ad::frobenius_norm_sq(ad::matmul(x[0], x[0])); };
  const double alpha = 1.7, beta = -0.4;
  const Expression h = [&](Tape& t, std::span<const Var> x) { return alpha * f(t, x) + beta * g(t, x); };
  const std::vector<Matrix> x{random_matrix(3, 3, rng)};
  const auto gf = ad::gradient(f, x).grads[0];
  const auto gg = ad::gradient(g, x).grads[0];
  const auto gh = ad::gradient(h, x).grads[0];
  EXPECT_LT(frobenius_norm(gh - (alpha * gf + beta * gg)), 1e-12 * std::max(1.0, frobenius_norm(gh)));
}

TEST(Autodiff, RecordingReusesOnePoint) {
  Rng rng(28);
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::sum(ad::exp(x[0]) * x[0]); };
  const std::vector<Matrix> x{random_matrix(2, 2, rng)};
  const ad::Recording rec(f, x);
  EXPECT_EQ(rec.value(), ad::evaluate(f, x));
  EXPECT_EQ(rec.gradient()[0], ad::gradient(f, x).grads[0]);
  const std::vector<Matrix> d{random_matrix(2, 2, rng)};
  EXPECT_EQ(rec.hess_vec(d)[0], ad::hess_vec(f, x, d, HessVecMode::ForwardOverReverse)[0]);
}

TEST(Autodiff, TapeIsTopologicallyOrdered) {
  Tape t;
  const Var x = t.input(Matrix{{1, 2}, {3, 4}});
  const Var y = ad::sum(ad::matmul(x, ad::transpose(x)) + ad::exp(x));
  EXPECT_EQ(y.rows(), 1u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LT(t.node(i).lhs, static_cast<long>(i));
    EXPECT_LT(t.node(i).rhs, static_cast<long>(i));
  }
}

TEST(Autodiff, ShapeMismatchNamesTheOp) {
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::sum(x[0] + x[1]); };
  try {
    ad::evaluate(f, std::vector<Matrix>{Matrix(2, 2), Matrix(2, 3)});
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("add"), std::string::npos) << e.what();
  }
  const Expression g = [](Tape&, std::span<const Var> x) { return ad::sum(ad::matmul(x[0], x[0])); };
  EXPECT_THROW(ad::evaluate(g, std::vector<Matrix>{Matrix(2, 3)}), DimensionError);
}

TEST(Autodiff, NonScalarOutputIsRejected) {
  const Expression f = [](Tape&, std::span<const Var> x) { return x[0]; };
  EXPECT_THROW(ad::gradient(f, std::vector<Matrix>{Matrix(2, 2)}), ContractError);
}

TEST(Autodiff, SmoothAbsNeedsPositiveDelta) {
  const Expression f = [](Tape&, std::span<const Var> x) { return ad::sum(ad::smooth_abs(x[0], 0.0)); };
  EXPECT_THROW(ad::evaluate(f, std::vector<Matrix>{Matrix(1, 1)}), ContractError);
}

}  // namespace
}  // namespace rmopt
