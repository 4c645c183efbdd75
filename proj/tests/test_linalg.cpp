#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rmopt/errors.hpp"
#include "rmopt/linalg.hpp"
#include "test_util.hpp"

namespace rmopt {
namespace {

using testing::diag;
using testing::random_matrix;
using testing::random_spd;

double orthonormality_error(const Matrix& q) {
  return frobenius_norm(matmul_tn(q, q) - Matrix::identity(q.cols()));
}

TEST(QR, IdentityCase) {
  const QRFactors f = qr_thin(Matrix::identity(3));
  EXPECT_LT(frobenius_norm(f.q - Matrix::identity(3)), 1e-15);
  EXPECT_LT(frobenius_norm(f.r - Matrix::identity(3)), 1e-15);
}

TEST(QR, PythagoreanColumn) {
  const QRFactors f = qr_thin(Matrix{{3}, {4}});
  EXPECT_NEAR(f.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(f.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(f.r(0, 0), 5.0, 1e-14);
}

TEST(QR, RandomReconstructionAndSigns) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_matrix(6, 3, rng);
    const QRFactors f = qr_thin(a);
    EXPECT_LT(orthonormality_error(f.q), 1e-12);
    EXPECT_LT(frobenius_norm(matmul(f.q, f.r) - a), 1e-12 * frobenius_norm(a));
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_GT(f.r(i, i), 0.0);
      for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(f.r(i, j), 0.0);
    }
  }
}

TEST(QR, RankDeficientInput) {
  const Matrix a{{1, 2}, {2, 4}, {3, 6}};
  EXPECT_THROW(qr_thin(a), DegeneracyError);
  EXPECT_THROW(qr_thin(Matrix(3, 2)), DegeneracyError);
  EXPECT_THROW(qr_thin(Matrix(2, 3, 1.0)), DimensionError);
}

TEST(SymEig, DiagonalCase) {
  const SymEig e = sym_eig(diag({3, 1, 2}));
  ASSERT_EQ(e.values.size(), 3u);
  EXPECT_NEAR(e.values[0], 1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 2.0, 1e-14);
  EXPECT_NEAR(e.values[2], 3.0, 1e-14);
}

TEST(SymEig, ClassicTwoByTwo) {
  const SymEig e = sym_eig(Matrix{{0, 1}, {1, 0}});
  EXPECT_NEAR(e.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
}

TEST(SymEig, RandomReconstruction) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = sym(random_matrix(8, 8, rng));
    const SymEig e = sym_eig(a);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    Matrix scaled = e.vectors;
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t r = 0; r < 8; ++r) scaled(r, c) *= e.values[c];
    EXPECT_LT(frobenius_norm(matmul_nt(scaled, e.vectors) - a), 1e-10 * frobenius_norm(a));
    EXPECT_LT(frobenius_norm(matmul(a, e.vectors) - scaled), 1e-10 * frobenius_norm(a));
  }
}

TEST(SymEig, NonSquare) { EXPECT_THROW(sym_eig(Matrix(2, 3)), DimensionError); }

TEST(SymEig, GramEigenvaluesAreSquaredSingularValues) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(7, 4, rng);
    const SymEig e = sym_eig(matmul_tn(a, a));
    const SVDFactors s = svd_thin(a);
    for (std::size_t i = 0; i < 4; ++i) {
      const double sv2 = s.s[3 - i] * s.s[3 - i];
      EXPECT_NEAR(e.values[i], sv2, 1e-9 * std::max(1.0, sv2));
    }
  }
}

TEST(SVD, DiagonalCase) {
  const SVDFactors f = svd_thin(diag({2, 1}));
  EXPECT_NEAR(f.s[0], 2.0, 1e-15);
  EXPECT_NEAR(f.s[1], 1.0, 1e-15);
}

TEST(SVD, ZeroMatrix) {
  const SVDFactors f = svd_thin(Matrix(3, 2));
  for (double s : f.s) EXPECT_EQ(s, 0.0);
}

TEST(SVD, RandomReconstruction) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(5, 3, rng);
    const SVDFactors f = svd_thin(a);
    EXPECT_TRUE(std::is_sorted(f.s.rbegin(), f.s.rend()));
    Matrix us = f.u;
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t r = 0; r < 5; ++r) us(r, c) *= f.s[c];
    EXPECT_LT(frobenius_norm(matmul_nt(us, f.v) - a), 1e-12 * frobenius_norm(a));
    EXPECT_LT(orthonormality_error(f.u), 1e-12);
    EXPECT_LT(orthonormality_error(f.v), 1e-12);
  }
}

TEST(Sylvester, IdentityCoefficient) {
  Rng rng(14);
  const Matrix c = random_matrix(3, 3, rng);
  EXPECT_LT(frobenius_norm(solve_sylvester_sym(Matrix::identity(3), c) - 0.5 * c), 1e-15);
}

TEST(Sylvester, ComponentwiseDivision) {
  const Matrix omega = solve_sylvester_sym(diag({1, 3}), Matrix{{2, 4}, {4, 6}});
  EXPECT_LT(frobenius_norm(omega - Matrix{{1, 1}, {1, 1}}), 1e-14);
}

TEST(Sylvester, RandomResidual) {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix b = random_spd(4, rng);
    const Matrix c = random_matrix(4, 4, rng);
    const Matrix omega = solve_sylvester_sym(b, c);
    EXPECT_LT(frobenius_norm(matmul(omega, b) + matmul(b, omega) - c), 1e-11 * frobenius_norm(c));
  }
}

TEST(Sylvester, RejectsNonPositiveDefinite) {
  EXPECT_THROW(solve_sylvester_sym(diag({1, 0}), Matrix::identity(2)), DegeneracyError);
  EXPECT_THROW(solve_sylvester_sym(diag({1, -1}), Matrix::identity(2)), DegeneracyError);
  EXPECT_THROW(solve_sylvester_sym(Matrix::identity(2), Matrix(3, 3)), DimensionError);
}

}  // namespace
}  // namespace rmopt
