#pragma once

#include <vector>

#include "rmopt/matrix.hpp"

namespace rmopt {

/// Thin QR factors: q is n×p with orthonormal columns, r is p×p upper
/// triangular with a strictly positive diagonal.
struct QRFactors {
  Matrix q;
  Matrix r;
};

/// Symmetric eigendecomposition with eigenvalues in ascending order;
/// column i of `vectors` pairs with values[i].
struct SymEig {
  std::vector<double> values;
  Matrix vectors;
};

/// Thin SVD a = u·diag(s)·vᵀ with s descending and nonnegative.
struct SVDFactors {
  Matrix u;
  std::vector<double> s;
  Matrix v;
};

/// Throws DegeneracyError when a is numerically rank deficient
/// (|r_ii| < 1e-12·‖a‖_F) and DimensionError when rows < cols.
QRFactors qr_thin(const Matrix& a);

/// The q factor of qr_thin.
Matrix qf(const Matrix& a);

/// Input is symmetrized before factorization.
SymEig sym_eig(const Matrix& a);

SVDFactors svd_thin(const Matrix& a);

/// Solves Ω·b + b·Ω = c for symmetric positive definite b via the
/// eigenbasis of b. Throws DegeneracyError if b is not numerically SPD.
Matrix solve_sylvester_sym(const Matrix& b, const Matrix& c);

}  // namespace rmopt
