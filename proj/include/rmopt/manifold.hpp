#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rmopt/element.hpp"

namespace rmopt {

/// The one random engine used throughout; always seeded explicitly.
using Rng = std::mt19937_64;

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const Shape&) const = default;
};

/// A Riemannian manifold with a retraction and projection-based vector
/// transport. Points, tangent vectors and ambient quantities are Elements
/// whose parts have the shapes returned by shapes().
///
/// Quotient manifolds (Grassmann, PSDFixedRank) work on representatives in
/// the total space; proj() then maps onto the horizontal space.
///
/// Implementations are immutable and may be shared across threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  /// Natural length scale; sizes the default trust region.
  virtual double typical_dist() const = 0;
  virtual std::vector<Shape> shapes() const = 0;
  std::size_t num_parts() const { return shapes().size(); }

  virtual double inner(const Point& x, const Tangent& u, const Tangent& v) const;
  double norm(const Point& x, const Tangent& u) const;

  /// Orthogonal projection of an ambient vector onto the tangent (or
  /// horizontal) space at x.
  virtual Tangent proj(const Point& x, const Element& h) const = 0;
  virtual Point retr(const Point& x, const Tangent& u) const = 0;
  /// A retraction whose curves match geodesics to second order. Derivative
  /// checks use it for the Hessian; defaults to retr() where that already
  /// qualifies.
  virtual Point retr_second_order(const Point& x, const Tangent& u) const { return retr(x, u); }

  virtual Tangent egrad2rgrad(const Point& x, const Element& egrad) const;
  /// Riemannian Hessian applied to u, given the Euclidean gradient and the
  /// Euclidean Hessian applied to u.
  virtual Tangent ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                              const Tangent& u) const = 0;

  virtual Point rand(Rng& rng) const = 0;
  /// Unit-norm random tangent vector at x.
  virtual Tangent randvec(const Point& x, Rng& rng) const;
  Tangent zerovec(const Point& x) const;

  /// Projection transport of u from T_x to T_y.
  virtual Tangent transp(const Point& x, const Point& y, const Tangent& u) const;

  /// Whether dist() and pairmean() are implemented.
  virtual bool has_dist() const { return false; }
  virtual double dist(const Point& x, const Point& y) const;
  /// Geodesic midpoint.
  virtual Point pairmean(const Point& x, const Point& y) const;

  /// Distance of x from satisfying the membership constraints; 0 when exactly feasible.
  virtual double membership_residual(const Point& x) const = 0;

  /// Throws DimensionError unless e has this manifold's part layout.
  void check_layout(const Element& e, const char* op) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Matrix of independent standard normal samples.
Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace rmopt
