#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmopt/matrix.hpp"

namespace rmopt {

/// An ordered list of matrices: the representation of points, tangent
/// vectors and ambient (Euclidean) quantities on every manifold. Single
/// geometries use one part; product manifolds concatenate their components'
/// parts in order.
class Element {
 public:
  Element() = default;
  Element(Matrix m);  // NOLINT(google-explicit-constructor): a matrix is a one-part element
  explicit Element(std::vector<Matrix> parts) : parts_(std::move(parts)) {}

  std::size_t num_parts() const noexcept { return parts_.size(); }
  const Matrix& part(std::size_t i) const { return parts_.at(i); }
  Matrix& part(std::size_t i) { return parts_.at(i); }
  std::span<const Matrix> parts() const noexcept { return parts_; }
  std::span<Matrix> parts() noexcept { return parts_; }

  /// The only part of a single-part element.
  const Matrix& matrix() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(double s);

  bool operator==(const Element& other) const = default;

 private:
  std::vector<Matrix> parts_;
};

using Point = Element;
using Tangent = Element;

Element operator+(Element a, const Element& b);
Element operator-(Element a, const Element& b);
Element operator-(Element a);
Element operator*(double s, Element a);
Element operator*(Element a, double s);

/// a + s·b
Element axpy(const Element& a, double s, const Element& b);

/// Sum of Frobenius inner products over parts.
double inner(const Element& a, const Element& b);
double frobenius_norm(const Element& a);
bool all_finite(const Element& a);
Element zeros_like(const Element& a);

/// Parts [offset, offset+count).
Element slice(const Element& a, std::size_t offset, std::size_t count);
Element concat(std::span<const Element> pieces);

}  // namespace rmopt
