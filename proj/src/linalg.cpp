#include "rmopt/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_view.hpp"
#include "rmopt/errors.hpp"

namespace rmopt {

using detail::from_eigen;
using detail::view;

QRFactors qr_thin(const Matrix& a) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  const auto p = static_cast<Eigen::Index>(a.cols());
  if (n < p) throw DimensionError("qr_thin: needs rows >= cols, got " + a.shape_string());
  if (p == 0) return {Matrix(a.rows(), 0), Matrix(0, 0)};

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(view(a));
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  const double scale = frobenius_norm(a);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(std::abs(r(i, i)) >= 1e-12 * scale) || scale == 0.0) {
      throw DegeneracyError("qr_thin: input is rank deficient (column " + std::to_string(i) + ")");
    }
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {from_eigen(q), from_eigen(r)};
}

Matrix qf(const Matrix& a) { return qr_thin(a).q; }

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_eig: matrix is " + a.shape_string());
  if (a.rows() == 0) return {{}, Matrix(0, 0)};
  const Matrix s = sym(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(view(s));
  if (solver.info() != Eigen::Success) throw DegeneracyError("sym_eig: did not converge");
  const auto& ev = solver.eigenvalues();
  return {std::vector<double>(ev.data(), ev.data() + ev.size()), from_eigen(solver.eigenvectors())};
}

SVDFactors svd_thin(const Matrix& a) {
  if (a.size() == 0) return {Matrix(a.rows(), 0), {}, Matrix(a.cols(), 0)};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(view(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  return {from_eigen(svd.matrixU()), std::vector<double>(s.data(), s.data() + s.size()),
          from_eigen(svd.matrixV())};
}

Matrix solve_sylvester_sym(const Matrix& b, const Matrix& c) {
  if (b.rows() != b.cols() || !b.same_shape(c)) {
    throw DimensionError("solve_sylvester_sym: need square b and c of equal shape, got " +
                         b.shape_string() + " and " + c.shape_string());
  }
  const SymEig eig = sym_eig(b);
  const std::size_t k = b.rows();
  if (k == 0) return Matrix(0, 0);
  const double lmax = eig.values.back();
  const double lmin = eig.values.front();
  if (!(lmax > 0.0) || lmin <= 1e-14 * lmax) {
    throw DegeneracyError("solve_sylvester_sym: b is not positive definite");
  }
  const Matrix& v = eig.vectors;
  Matrix rotated = matmul(matmul_tn(v, c), v);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) rotated(i, j) /= eig.values[i] + eig.values[j];
  return matmul_nt(matmul(v, rotated), v);
}

}  // namespace rmopt
