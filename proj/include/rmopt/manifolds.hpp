#pragma once

#include <vector>

#include "rmopt/manifold.hpp"

namespace rmopt {

/// ℝ^{m×n} with the Frobenius metric.
class Euclidean final : public Manifold {
 public:
  Euclidean(std::size_t rows, std::size_t cols = 1);

  std::string name() const override;
  std::size_t dim() const override { return rows_ * cols_; }
  double typical_dist() const override;
  std::vector<Shape> shapes() const override { return {{rows_, cols_}}; }

  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  Tangent egrad2rgrad(const Point& x, const Element& egrad) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;
  Tangent transp(const Point& x, const Point& y, const Tangent& u) const override;

  bool has_dist() const override { return true; }
  double dist(const Point& x, const Point& y) const override;
  Point pairmean(const Point& x, const Point& y) const override;
  double membership_residual(const Point& x) const override;

 private:
  std::size_t rows_;
  std::size_t cols_;
};

/// Unit sphere in ℝⁿ, points stored as n×1 columns.
class Sphere final : public Manifold {
 public:
  explicit Sphere(std::size_t n);

  std::string name() const override;
  std::size_t dim() const override { return n_ - 1; }
  double typical_dist() const override;
  std::vector<Shape> shapes() const override { return {{n_, 1}}; }

  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;

  bool has_dist() const override { return true; }
  double dist(const Point& x, const Point& y) const override;
  /// Throws DegeneracyError for (numerically) antipodal points.
  Point pairmean(const Point& x, const Point& y) const override;
  double membership_residual(const Point& x) const override;

 private:
  std::size_t n_;
};

/// n×p matrices with orthonormal columns, embedded metric, QR retraction.
class Stiefel final : public Manifold {
 public:
  Stiefel(std::size_t n, std::size_t p);

  std::string name() const override;
  std::size_t dim() const override { return n_ * p_ - p_ * (p_ + 1) / 2; }
  double typical_dist() const override;
  std::vector<Shape> shapes() const override { return {{n_, p_}}; }

  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  /// Polar retraction.
  Point retr_second_order(const Point& x, const Tangent& u) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;
  double membership_residual(const Point& x) const override;

 private:
  std::size_t n_;
  std::size_t p_;
};

/// p-dimensional subspaces of ℝⁿ, represented by orthonormal n×p bases.
class Grassmann final : public Manifold {
 public:
  Grassmann(std::size_t n, std::size_t p);

  std::string name() const override;
  std::size_t dim() const override { return p_ * (n_ - p_); }
  double typical_dist() const override;
  std::vector<Shape> shapes() const override { return {{n_, p_}}; }

  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;

  bool has_dist() const override { return true; }
  /// 2-norm of the principal angles.
  double dist(const Point& x, const Point& y) const override;
  /// Midpoint built from bisectors of principal vector pairs.
  Point pairmean(const Point& x, const Point& y) const override;
  double membership_residual(const Point& x) const override;

 private:
  std::size_t n_;
  std::size_t p_;
};

/// Rank-k positive semidefinite n×n matrices S = YYᵀ, handled through the
/// full-rank factor Y ∈ ℝ^{n×k} modulo Y ~ YQ for orthogonal Q. The
/// total-space metric is trace(UᵀV); tangent vectors are horizontal lifts,
/// i.e. YᵀU is symmetric.
class PSDFixedRank final : public Manifold {
 public:
  PSDFixedRank(std::size_t n, std::size_t k);

  std::string name() const override;
  std::size_t dim() const override { return n_ * k_ - k_ * (k_ - 1) / 2; }
  double typical_dist() const override;
  std::vector<Shape> shapes() const override { return {{n_, k_}}; }

  /// U − YΩ with Ω the antisymmetric solution of Ω(YᵀY) + (YᵀY)Ω = YᵀU − UᵀY.
  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;
  double membership_residual(const Point& x) const override;

 private:
  std::size_t n_;
  std::size_t k_;
};

/// Cartesian product; every operation acts componentwise.
class Product final : public Manifold {
 public:
  explicit Product(std::vector<ManifoldPtr> components);

  const std::vector<ManifoldPtr>& components() const noexcept { return components_; }

  std::string name() const override;
  std::size_t dim() const override;
  double typical_dist() const override;
  std::vector<Shape> shapes() const override;

  double inner(const Point& x, const Tangent& u, const Tangent& v) const override;
  Tangent proj(const Point& x, const Element& h) const override;
  Point retr(const Point& x, const Tangent& u) const override;
  Point retr_second_order(const Point& x, const Tangent& u) const override;
  Tangent egrad2rgrad(const Point& x, const Element& egrad) const override;
  Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                      const Tangent& u) const override;
  Point rand(Rng& rng) const override;
  /// Componentwise randvec, scaled by 1/√(component count) to unit norm.
  Tangent randvec(const Point& x, Rng& rng) const override;
  Tangent transp(const Point& x, const Point& y, const Tangent& u) const override;

  bool has_dist() const override;
  double dist(const Point& x, const Point& y) const override;
  Point pairmean(const Point& x, const Point& y) const override;
  double membership_residual(const Point& x) const override;

  /// Component i's parts of e.
  Element component(const Element& e, std::size_t i) const;

 private:
  std::vector<ManifoldPtr> components_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> counts_;
};

}  // namespace rmopt
