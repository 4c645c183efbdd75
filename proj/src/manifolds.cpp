#include "rmopt/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rmopt/errors.hpp"
#include "rmopt/linalg.hpp"

namespace rmopt {

// ---- Manifold defaults ----

Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

void Manifold::check_layout(const Element& e, const char* op) const {
  const std::vector<Shape> expected = shapes();
  if (e.num_parts() != expected.size()) {
    throw DimensionError(name() + "::" + op + ": expected " + std::to_string(expected.size()) +
                         " parts, got " + std::to_string(e.num_parts()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const Matrix& m = e.part(i);
    if (m.rows() != expected[i].rows || m.cols() != expected[i].cols) {
      throw DimensionError(name() + "::" + op + ": part " + std::to_string(i) + " is " +
                           m.shape_string() + ", expected " + std::to_string(expected[i].rows) + "x" +
                           std::to_string(expected[i].cols));
    }
  }
}

double Manifold::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  check_layout(x, "inner");
  check_layout(u, "inner");
  check_layout(v, "inner");
  return rmopt::inner(u, v);
}

double Manifold::norm(const Point& x, const Tangent& u) const { return std::sqrt(inner(x, u, u)); }

Tangent Manifold::egrad2rgrad(const Point& x, const Element& egrad) const { return proj(x, egrad); }

Tangent Manifold::randvec(const Point& x, Rng& rng) const {
  check_layout(x, "randvec");
  std::vector<Matrix> parts;
  for (const Shape& s : shapes()) parts.push_back(gaussian(s.rows, s.cols, rng));
  Tangent u = proj(x, Element(std::move(parts)));
  const double length = norm(x, u);
  u *= 1.0 / length;
  return u;
}

Tangent Manifold::zerovec(const Point& x) const {
  check_layout(x, "zerovec");
  return zeros_like(x);
}

Tangent Manifold::transp(const Point& x, const Point& y, const Tangent& u) const {
  check_layout(x, "transp");
  return proj(y, u);
}

double Manifold::dist(const Point&, const Point&) const {
  throw UnsupportedOperation(name() + " does not provide dist");
}

Point Manifold::pairmean(const Point&, const Point&) const {
  throw UnsupportedOperation(name() + " does not provide pairmean");
}

namespace {

std::string dims(std::size_t a, std::size_t b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

Matrix normalized(Matrix m) {
  const double n = frobenius_norm(m);
  if (!(n > 0.0)) throw DegeneracyError("cannot normalize a zero vector");
  return m /= n;
}

double orthonormality_residual(const Matrix& x) {
  return frobenius_norm(matmul_tn(x, x) - Matrix::identity(x.cols()));
}

}  // namespace

// ---- Euclidean ----

Euclidean::Euclidean(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw ContractError("Euclidean: dimensions must be positive");
}

std::string Euclidean::name() const { return "Euclidean" + dims(rows_, cols_); }
double Euclidean::typical_dist() const { return std::sqrt(static_cast<double>(dim())); }

Tangent Euclidean::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  return h;
}

Point Euclidean::retr(const Point& x, const Tangent& u) const {
  check_layout(u, "retr");
  return x.matrix() + u.matrix();
}

Tangent Euclidean::egrad2rgrad(const Point& x, const Element& egrad) const { return proj(x, egrad); }

Tangent Euclidean::ehess2rhess(const Point& x, const Element&, const Element& ehess_u,
                               const Tangent&) const {
  return proj(x, ehess_u);
}

Point Euclidean::rand(Rng& rng) const { return gaussian(rows_, cols_, rng); }

Tangent Euclidean::transp(const Point& x, const Point& y, const Tangent& u) const {
  check_layout(x, "transp");
  check_layout(y, "transp");
  return proj(y, u);
}

double Euclidean::dist(const Point& x, const Point& y) const {
  check_layout(x, "dist");
  check_layout(y, "dist");
  return frobenius_norm(x.matrix() - y.matrix());
}

Point Euclidean::pairmean(const Point& x, const Point& y) const {
  check_layout(x, "pairmean");
  check_layout(y, "pairmean");
  return 0.5 * (x.matrix() + y.matrix());
}

double Euclidean::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  return all_finite(x) ? 0.0 : std::numeric_limits<double>::infinity();
}

// ---- Sphere ----

Sphere::Sphere(std::size_t n) : n_(n) {
  if (n < 2) throw ContractError("Sphere: n must be at least 2");
}

std::string Sphere::name() const { return "Sphere(" + std::to_string(n_) + ")"; }
double Sphere::typical_dist() const { return std::numbers::pi; }

Tangent Sphere::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  const Matrix& xm = x.matrix();
  return h.matrix() - rmopt::inner(xm, h.matrix()) * xm;
}

Point Sphere::retr(const Point& x, const Tangent& u) const {
  check_layout(x, "retr");
  check_layout(u, "retr");
  return normalized(x.matrix() + u.matrix());
}

Tangent Sphere::ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                            const Tangent& u) const {
  check_layout(egrad, "ehess2rhess");
  check_layout(u, "ehess2rhess");
  const double radial = rmopt::inner(x.matrix(), egrad.matrix());
  return proj(x, ehess_u).matrix() - radial * u.matrix();
}

Point Sphere::rand(Rng& rng) const { return normalized(gaussian(n_, 1, rng)); }

double Sphere::dist(const Point& x, const Point& y) const {
  check_layout(x, "dist");
  check_layout(y, "dist");
  // Equals arccos(clamp(⟨x,y⟩)) for unit vectors, without its loss of
  // accuracy near 0 and π.
  const double chord = frobenius_norm(x.matrix() - y.matrix());
  const double anti = frobenius_norm(x.matrix() + y.matrix());
  return 2.0 * std::atan2(chord, anti);
}

Point Sphere::pairmean(const Point& x, const Point& y) const {
  check_layout(x, "pairmean");
  check_layout(y, "pairmean");
  const double c = std::clamp(rmopt::inner(x.matrix(), y.matrix()), -1.0, 1.0);
  if (c <= -1.0 + 1e-12) throw DegeneracyError("Sphere::pairmean: points are antipodal");
  return normalized(x.matrix() + y.matrix());
}

double Sphere::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  return std::abs(frobenius_norm(x.matrix()) - 1.0);
}

// ---- Stiefel ----

Stiefel::Stiefel(std::size_t n, std::size_t p) : n_(n), p_(p) {
  if (p == 0 || n < p) throw ContractError("Stiefel: need 1 <= p <= n, got " + dims(n, p));
  if (dim() == 0) throw ContractError("Stiefel: manifold is zero-dimensional");
}

std::string Stiefel::name() const { return "Stiefel" + dims(n_, p_); }
double Stiefel::typical_dist() const { return std::sqrt(static_cast<double>(p_)) * std::numbers::pi; }

Tangent Stiefel::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  const Matrix& xm = x.matrix();
  return h.matrix() - matmul(xm, sym(matmul_tn(xm, h.matrix())));
}

Point Stiefel::retr(const Point& x, const Tangent& u) const {
  check_layout(x, "retr");
  check_layout(u, "retr");
  return qf(x.matrix() + u.matrix());
}

Point Stiefel::retr_second_order(const Point& x, const Tangent& u) const {
  check_layout(x, "retr_second_order");
  check_layout(u, "retr_second_order");
  const SVDFactors f = svd_thin(x.matrix() + u.matrix());
  if (f.s.back() <= 1e-12 * f.s.front()) throw DegeneracyError("Stiefel: polar retraction of a rank-deficient matrix");
  return matmul_nt(f.u, f.v);
}

Tangent Stiefel::ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                             const Tangent& u) const {
  check_layout(egrad, "ehess2rhess");
  check_layout(ehess_u, "ehess2rhess");
  check_layout(u, "ehess2rhess");
  const Matrix correction = matmul(u.matrix(), sym(matmul_tn(x.matrix(), egrad.matrix())));
  return proj(x, ehess_u.matrix() - correction);
}

Point Stiefel::rand(Rng& rng) const { return qf(gaussian(n_, p_, rng)); }

double Stiefel::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  return orthonormality_residual(x.matrix());
}

// ---- Grassmann ----

Grassmann::Grassmann(std::size_t n, std::size_t p) : n_(n), p_(p) {
  if (p == 0 || n <= p) throw ContractError("Grassmann: need 1 <= p < n, got " + dims(n, p));
}

std::string Grassmann::name() const { return "Grassmann" + dims(n_, p_); }
double Grassmann::typical_dist() const { return std::sqrt(static_cast<double>(p_)) * std::numbers::pi; }

Tangent Grassmann::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  const Matrix& xm = x.matrix();
  return h.matrix() - matmul(xm, matmul_tn(xm, h.matrix()));
}

Point Grassmann::retr(const Point& x, const Tangent& u) const {
  check_layout(x, "retr");
  check_layout(u, "retr");
  return qf(x.matrix() + u.matrix());
}

Tangent Grassmann::ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                               const Tangent& u) const {
  check_layout(egrad, "ehess2rhess");
  check_layout(u, "ehess2rhess");
  const Matrix correction = matmul(u.matrix(), matmul_tn(x.matrix(), egrad.matrix()));
  return proj(x, ehess_u).matrix() - correction;
}

Point Grassmann::rand(Rng& rng) const { return qf(gaussian(n_, p_, rng)); }

double Grassmann::dist(const Point& x, const Point& y) const {
  check_layout(x, "dist");
  check_layout(y, "dist");
  const Matrix& xm = x.matrix();
  const Matrix& ym = y.matrix();
  // Cosines and sines of the principal angles, paired through their
  // opposite orderings; atan2 keeps small angles accurate.
  const std::vector<double> cosines = svd_thin(matmul_tn(xm, ym)).s;
  const std::vector<double> sines = svd_thin(ym - matmul(xm, matmul_tn(xm, ym))).s;
  double total = 0.0;
  for (std::size_t i = 0; i < p_; ++i) {
    const double theta = std::atan2(sines[p_ - 1 - i], cosines[i]);
    total += theta * theta;
  }
  return std::sqrt(total);
}

Point Grassmann::pairmean(const Point& x, const Point& y) const {
  check_layout(x, "pairmean");
  check_layout(y, "pairmean");
  const SVDFactors f = svd_thin(matmul_tn(x.matrix(), y.matrix()));
  // Principal vector pairs (XU_i, YV_i) are mutually orthogonal across i, so
  // their bisectors span the subspace halfway along every principal angle.
  Matrix bisectors = matmul(x.matrix(), f.u) + matmul(y.matrix(), f.v);
  for (std::size_t c = 0; c < p_; ++c) {
    double n2 = 0.0;
    for (std::size_t r = 0; r < n_; ++r) n2 += bisectors(r, c) * bisectors(r, c);
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t r = 0; r < n_; ++r) bisectors(r, c) *= inv;
  }
  return qf(bisectors);
}

double Grassmann::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  return orthonormality_residual(x.matrix());
}

// ---- PSDFixedRank ----

PSDFixedRank::PSDFixedRank(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (k == 0 || n < k) throw ContractError("PSDFixedRank: need 1 <= k <= n, got " + dims(n, k));
}

std::string PSDFixedRank::name() const { return "PSDFixedRank" + dims(n_, k_); }
double PSDFixedRank::typical_dist() const { return 1.0 + std::sqrt(static_cast<double>(k_)); }

Tangent PSDFixedRank::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  const Matrix& y = x.matrix();
  const Matrix& u = h.matrix();
  const Matrix yty = matmul_tn(y, y);
  const Matrix ytu = matmul_tn(y, u);
  const Matrix omega = solve_sylvester_sym(yty, ytu - transpose(ytu));
  return u - matmul(y, skew(omega));
}

Point PSDFixedRank::retr(const Point& x, const Tangent& u) const {
  check_layout(x, "retr");
  check_layout(u, "retr");
  return x.matrix() + u.matrix();
}

Tangent PSDFixedRank::ehess2rhess(const Point& x, const Element&, const Element& ehess_u,
                                  const Tangent& u) const {
  check_layout(u, "ehess2rhess");
  return proj(x, ehess_u);
}

Point PSDFixedRank::rand(Rng& rng) const { return gaussian(n_, k_, rng); }

double PSDFixedRank::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  if (!all_finite(x)) return std::numeric_limits<double>::infinity();
  const std::vector<double> s = svd_thin(x.matrix()).s;
  return s.back() > 1e-10 * s.front() ? 0.0 : 1.0;
}

// ---- Product ----

Product::Product(std::vector<ManifoldPtr> components) : components_(std::move(components)) {
  if (components_.empty()) throw ContractError("Product: needs at least one component");
  std::size_t offset = 0;
  for (const auto& m : components_) {
    if (!m) throw ContractError("Product: null component");
    offsets_.push_back(offset);
    counts_.push_back(m->num_parts());
    offset += m->num_parts();
  }
}

std::string Product::name() const {
  std::string s = "Product(";
  for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? ", " : "") + components_[i]->name();
  return s + ")";
}

std::size_t Product::dim() const {
  std::size_t d = 0;
  for (const auto& m : components_) d += m->dim();
  return d;
}

double Product::typical_dist() const {
  double s = 0.0;
  for (const auto& m : components_) s += m->typical_dist() * m->typical_dist();
  return std::sqrt(s);
}

std::vector<Shape> Product::shapes() const {
  std::vector<Shape> out;
  for (const auto& m : components_) {
    const auto s = m->shapes();
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

Element Product::component(const Element& e, std::size_t i) const {
  return slice(e, offsets_.at(i), counts_.at(i));
}

namespace {

template <typename F>
Element map_components(const Product& p, F&& f) {
  std::vector<Element> pieces;
  pieces.reserve(p.components().size());
  for (std::size_t i = 0; i < p.components().size(); ++i) pieces.push_back(f(i, *p.components()[i]));
  return concat(pieces);
}

}  // namespace

double Product::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  check_layout(x, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i)
    s += components_[i]->inner(component(x, i), component(u, i), component(v, i));
  return s;
}

Tangent Product::proj(const Point& x, const Element& h) const {
  check_layout(x, "proj");
  check_layout(h, "proj");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.proj(component(x, i), component(h, i));
  });
}

Point Product::retr(const Point& x, const Tangent& u) const {
  check_layout(x, "retr");
  check_layout(u, "retr");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.retr(component(x, i), component(u, i));
  });
}

Point Product::retr_second_order(const Point& x, const Tangent& u) const {
  check_layout(x, "retr_second_order");
  check_layout(u, "retr_second_order");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.retr_second_order(component(x, i), component(u, i));
  });
}

Tangent Product::egrad2rgrad(const Point& x, const Element& egrad) const {
  check_layout(x, "egrad2rgrad");
  check_layout(egrad, "egrad2rgrad");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.egrad2rgrad(component(x, i), component(egrad, i));
  });
}

Tangent Product::ehess2rhess(const Point& x, const Element& egrad, const Element& ehess_u,
                             const Tangent& u) const {
  check_layout(x, "ehess2rhess");
  check_layout(egrad, "ehess2rhess");
  check_layout(ehess_u, "ehess2rhess");
  check_layout(u, "ehess2rhess");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.ehess2rhess(component(x, i), component(egrad, i), component(ehess_u, i), component(u, i));
  });
}

Point Product::rand(Rng& rng) const {
  return map_components(*this, [&](std::size_t, const Manifold& m) { return m.rand(rng); });
}

Tangent Product::randvec(const Point& x, Rng& rng) const {
  check_layout(x, "randvec");
  const double scale = 1.0 / std::sqrt(static_cast<double>(components_.size()));
  return scale * map_components(*this, [&](std::size_t i, const Manifold& m) {
           return m.randvec(component(x, i), rng);
         });
}

Tangent Product::transp(const Point& x, const Point& y, const Tangent& u) const {
  check_layout(x, "transp");
  check_layout(y, "transp");
  check_layout(u, "transp");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.transp(component(x, i), component(y, i), component(u, i));
  });
}

bool Product::has_dist() const {
  return std::all_of(components_.begin(), components_.end(), [](const ManifoldPtr& m) { return m->has_dist(); });
}

double Product::dist(const Point& x, const Point& y) const {
  if (!has_dist()) throw UnsupportedOperation(name() + " does not provide dist");
  check_layout(x, "dist");
  check_layout(y, "dist");
  double s = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double d = components_[i]->dist(component(x, i), component(y, i));
    s += d * d;
  }
  return std::sqrt(s);
}

Point Product::pairmean(const Point& x, const Point& y) const {
  if (!has_dist()) throw UnsupportedOperation(name() + " does not provide pairmean");
  check_layout(x, "pairmean");
  check_layout(y, "pairmean");
  return map_components(*this, [&](std::size_t i, const Manifold& m) {
    return m.pairmean(component(x, i), component(y, i));
  });
}

double Product::membership_residual(const Point& x) const {
  check_layout(x, "membership_residual");
  double r = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i)
    r = std::max(r, components_[i]->membership_residual(component(x, i)));
  return r;
}

}  // namespace rmopt
