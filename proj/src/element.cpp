#include "rmopt/element.hpp"

#include <cmath>
#include <string>

#include "rmopt/errors.hpp"

namespace rmopt {
namespace {

void require_same_layout(const Element& a, const Element& b, const char* op) {
  if (a.num_parts() != b.num_parts()) {
    throw DimensionError(std::string(op) + ": element part counts differ (" +
                         std::to_string(a.num_parts()) + " vs " + std::to_string(b.num_parts()) + ")");
  }
}

}  // namespace

Element::Element(Matrix m) { parts_.push_back(std::move(m)); }

const Matrix& Element::matrix() const {
  if (parts_.size() != 1) {
    throw DimensionError("element has " + std::to_string(parts_.size()) + " parts, expected 1");
  }
  return parts_.front();
}

Element& Element::operator+=(const Element& other) {
  require_same_layout(*this, other, "add");
  for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i] += other.parts_[i];
  return *this;
}

Element& Element::operator-=(const Element& other) {
  require_same_layout(*this, other, "subtract");
  for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i] -= other.parts_[i];
  return *this;
}

Element& Element::operator*=(double s) {
  for (Matrix& m : parts_) m *= s;
  return *this;
}

Element operator+(Element a, const Element& b) { return a += b; }
Element operator-(Element a, const Element& b) { return a -= b; }
Element operator-(Element a) { return a *= -1.0; }
Element operator*(double s, Element a) { return a *= s; }
Element operator*(Element a, double s) { return a *= s; }

Element axpy(const Element& a, double s, const Element& b) {
  require_same_layout(a, b, "axpy");
  Element out = a;
  for (std::size_t i = 0; i < out.num_parts(); ++i) {
    require_same_shape(out.part(i), b.part(i), "axpy");
    auto dst = out.part(i).values();
    auto src = b.part(i).values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
  }
  return out;
}

double inner(const Element& a, const Element& b) {
  require_same_layout(a, b, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.num_parts(); ++i) s += inner(a.part(i), b.part(i));
  return s;
}

double frobenius_norm(const Element& a) { return std::sqrt(inner(a, a)); }

bool all_finite(const Element& a) {
  for (const Matrix& m : a.parts())
    if (!all_finite(m)) return false;
  return true;
}

Element zeros_like(const Element& a) {
  std::vector<Matrix> parts;
  parts.reserve(a.num_parts());
  for (const Matrix& m : a.parts()) parts.emplace_back(m.rows(), m.cols());
  return Element(std::move(parts));
}

Element slice(const Element& a, std::size_t offset, std::size_t count) {
  if (offset + count > a.num_parts()) throw DimensionError("slice: out of range");
  return Element(std::vector<Matrix>(a.parts().begin() + static_cast<std::ptrdiff_t>(offset),
                                     a.parts().begin() + static_cast<std::ptrdiff_t>(offset + count)));
}

Element concat(std::span<const Element> pieces) {
  std::vector<Matrix> parts;
  for (const Element& e : pieces) parts.insert(parts.end(), e.parts().begin(), e.parts().end());
  return Element(std::move(parts));
}

}  // namespace rmopt
