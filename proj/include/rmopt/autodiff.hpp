#pragma once

// Tape-based reverse-mode automatic differentiation over Matrix values.
//
// A cost is written as an Expression: a callable that receives a Tape and
// one Var per input matrix and returns a 1x1 Var. Each evaluation records a
// fresh tape; gradients come from one reverse sweep over it. Hessian-vector
// products are available either as a central difference of two gradients
// or exactly, by pushing a tangent forward through the recorded tape and
// then differentiating the reverse sweep along it (forward-over-reverse).
//
// Elementwise binary ops broadcast a 1x1 operand against a matrix; any other
// shape disagreement is a DimensionError naming the op.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "rmopt/matrix.hpp"

namespace rmopt::ad {

enum class Op {
  Input,
  Constant,
  Add,
  Sub,
  Mul,
  Div,
  Scale,
  MatMul,
  Transpose,
  Trace,
  Sum,
  Square,
  Sqrt,
  SmoothAbs,
  Pow,
  Exp,
  Log,
  Neg,
  FrobeniusSq,
  Reshape,
};

std::string_view op_name(Op op);

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while its Tape lives.
class Var {
 public:
  Var() = default;

  std::size_t id() const noexcept { return id_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Tape& tape() const { return *tape_; }
  const Matrix& value() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id, std::size_t rows, std::size_t cols)
      : tape_(tape), id_(id), rows_(rows), cols_(cols) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

struct Node {
  Op op = Op::Constant;
  // Operand ids; -1 when unused. Every operand id is smaller than the node's own.
  long lhs = -1;
  long rhs = -1;
  // Scale factor, smoothing constant or exponent, depending on op.
  double param = 0.0;
  Matrix value;
};

/// Append-only record of operations. Not copyable or movable since Vars
/// point back into it.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable leaf. Leaves are numbered in creation order.
  Var input(Matrix value);
  Var constant(Matrix value);
  Var constant(double value) { return constant(Matrix::scalar(value)); }

  Var record(Op op, Matrix value, long lhs = -1, long rhs = -1, double param = 0.0);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  const std::vector<std::size_t>& inputs() const noexcept { return inputs_; }

  /// Adjoints of `output` (must be 1x1) with respect to every input leaf.
  std::vector<Matrix> gradient(const Var& output) const;

  /// Exact Hessian of `output` applied to `direction` (one matrix per input
  /// leaf), by forward-over-reverse sweeps.
  std::vector<Matrix> hess_vec(const Var& output, std::span<const Matrix> direction) const;

 private:
  std::vector<Node> nodes_;
  std::vector<std::size_t> inputs_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(double s, const Var& a);
Var operator*(const Var& a, double s);
Var operator/(const Var& a, double s);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var trace(const Var& a);
Var sum(const Var& a);
Var square(const Var& a);
Var sqrt(const Var& a);
/// Elementwise √(x² + δ²); δ is a fixed constant, not differentiated.
Var smooth_abs(const Var& a, double delta);
/// Elementwise x^p for a constant exponent p.
Var pow(const Var& a, double exponent);
Var exp(const Var& a);
Var log(const Var& a);
Var frobenius_norm_sq(const Var& a);
Var reshape(const Var& a, std::size_t rows, std::size_t cols);

/// A scalar-valued function of one or more matrix variables.
using Expression = std::function<Var(Tape&, std::span<const Var>)>;

struct GradResult {
  double value = 0.0;
  std::vector<Matrix> grads;
};

enum class HessVecMode { FiniteDifference, ForwardOverReverse };

/// A tape recorded at one point. Gradient and exact Hessian-vector products
/// at that point reuse the recorded primals.
class Recording {
 public:
  Recording(const Expression& f, std::span<const Matrix> inputs);

  double value() const noexcept { return value_; }
  const std::vector<Matrix>& gradient() const;
  std::vector<Matrix> hess_vec(std::span<const Matrix> direction) const;
  std::size_t tape_length() const noexcept { return tape_->size(); }

 private:
  std::unique_ptr<Tape> tape_;
  Var output_;
  double value_ = 0.0;
  mutable std::vector<Matrix> gradient_;
  mutable bool have_gradient_ = false;
};

double evaluate(const Expression& f, std::span<const Matrix> inputs);
GradResult gradient(const Expression& f, std::span<const Matrix> inputs);

/// Hessian of f at `inputs` applied to `direction`. The finite-difference
/// mode differences two AD gradients with step
/// h = ε^{1/3}·(1+‖x‖_F)/max(1,‖d‖_F).
std::vector<Matrix> hess_vec(const Expression& f, std::span<const Matrix> inputs,
                             std::span<const Matrix> direction,
                             HessVecMode mode = HessVecMode::FiniteDifference);

}  // namespace rmopt::ad
