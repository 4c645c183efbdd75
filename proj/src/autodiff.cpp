#include "rmopt/autodiff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rmopt/errors.hpp"

namespace rmopt::ad {
namespace {

// Entry i of m, treating a 1x1 matrix as a broadcast scalar.
inline double at(const Matrix& m, std::size_t i) { return m.size() == 1 ? m[0] : m[i]; }

template <typename F, typename... Ms>
Matrix emap(std::size_t rows, std::size_t cols, F&& f, const Ms&... ms) {
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(at(ms, i)...);
  return out;
}

template <typename F, typename... Ms>
Matrix emap_like(const Matrix& shape, F&& f, const Ms&... ms) {
  return emap(shape.rows(), shape.cols(), std::forward<F>(f), ms...);
}

Tape& same_tape(const Var& a, const Var& b, Op op) {
  if (&a.tape() != &b.tape()) {
    throw ContractError(std::string(op_name(op)) + ": operands live on different tapes");
  }
  return a.tape();
}

// Output shape of a broadcasting elementwise op.
std::pair<std::size_t, std::size_t> broadcast_shape(const Var& a, const Var& b, Op op) {
  const bool a_scalar = a.rows() == 1 && a.cols() == 1;
  const bool b_scalar = b.rows() == 1 && b.cols() == 1;
  if (a.rows() == b.rows() && a.cols() == b.cols()) return {a.rows(), a.cols()};
  if (a_scalar) return {b.rows(), b.cols()};
  if (b_scalar) return {a.rows(), a.cols()};
  throw DimensionError(std::string(op_name(op)) + ": shape mismatch " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                       std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

template <typename F>
Var elementwise_binary(const Var& a, const Var& b, Op op, F&& f) {
  Tape& tape = same_tape(a, b, op);
  const auto [r, c] = broadcast_shape(a, b, op);
  return tape.record(op, emap(r, c, std::forward<F>(f), a.value(), b.value()),
                     static_cast<long>(a.id()), static_cast<long>(b.id()));
}

template <typename F>
Var elementwise_unary(const Var& a, Op op, F&& f, double param = 0.0) {
  return a.tape().record(op, emap_like(a.value(), std::forward<F>(f), a.value()),
                         static_cast<long>(a.id()), -1, param);
}

// Adds `contrib` into slot, summing it down when the slot is 1x1 and the
// contribution is a broadcast matrix.
void accumulate(std::vector<Matrix>& slots, std::vector<bool>& touched, std::size_t id,
                const Matrix& node_value, const Matrix& contrib) {
  Matrix reduced = (node_value.is_scalar() && !contrib.is_scalar())
                       ? Matrix::scalar(rmopt::sum(contrib))
                       : contrib;
  if (!touched[id]) {
    slots[id] = std::move(reduced);
    touched[id] = true;
  } else {
    slots[id] += reduced;
  }
}

void require_scalar_output(const Var& output) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw ContractError("cost expression must produce a 1x1 value, got " +
                        std::to_string(output.rows()) + "x" + std::to_string(output.cols()));
  }
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Sub: return "subtract";
    case Op::Mul: return "multiply";
    case Op::Div: return "divide";
    case Op::Scale: return "scale";
    case Op::MatMul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::Trace: return "trace";
    case Op::Sum: return "sum";
    case Op::Square: return "square";
    case Op::Sqrt: return "sqrt";
    case Op::SmoothAbs: return "smooth_abs";
    case Op::Pow: return "pow";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Neg: return "negate";
    case Op::FrobeniusSq: return "frobenius_norm_sq";
    case Op::Reshape: return "reshape";
  }
  return "unknown";
}

const Matrix& Var::value() const { return tape_->node(id_).value; }

Var Tape::input(Matrix value) {
  Var v = record(Op::Input, std::move(value));
  inputs_.push_back(v.id());
  return v;
}

Var Tape::constant(Matrix value) { return record(Op::Constant, std::move(value)); }

Var Tape::record(Op op, Matrix value, long lhs, long rhs, double param) {
  const std::size_t id = nodes_.size();
  const std::size_t r = value.rows();
  const std::size_t c = value.cols();
  nodes_.push_back(Node{op, lhs, rhs, param, std::move(value)});
  return Var(this, id, r, c);
}

namespace {

// One reverse sweep. With `tangent` non-null it also carries the directional
// derivative of every adjoint along the forward tangents, which yields the
// Hessian-vector product at the input leaves.
struct Sweep {
  const std::vector<Node>& nodes;
  const std::vector<Matrix>* tangent;
  std::vector<Matrix> adj;
  std::vector<Matrix> dadj;
  std::vector<bool> touched;

  Sweep(const std::vector<Node>& n, const std::vector<Matrix>* t)
      : nodes(n), tangent(t), adj(n.size()), dadj(t ? n.size() : 0), touched(n.size(), false) {}

  void add(long id, const Matrix& g, const Matrix* dg) {
    const auto uid = static_cast<std::size_t>(id);
    const Matrix& shape = nodes[uid].value;
    const bool first = !touched[uid];
    accumulate(adj, touched, uid, shape, g);
    if (tangent) {
      Matrix reduced = (shape.is_scalar() && !dg->is_scalar()) ? Matrix::scalar(rmopt::sum(*dg)) : *dg;
      if (first) {
        dadj[uid] = std::move(reduced);
      } else {
        dadj[uid] += reduced;
      }
    }
  }

  const Matrix& t(long id) const { return (*tangent)[static_cast<std::size_t>(id)]; }

  void run(std::size_t output) {
    adj[output] = Matrix::scalar(1.0);
    touched[output] = true;
    if (tangent) dadj[output] = Matrix::scalar(0.0);

    for (std::size_t k = output + 1; k-- > 0;) {
      if (!touched[k]) continue;
      const Node& node = nodes[k];
      const Matrix& g = adj[k];
      const Matrix* dg = tangent ? &dadj[k] : nullptr;
      const Matrix& z = node.value;
      const Matrix* a = node.lhs >= 0 ? &nodes[static_cast<std::size_t>(node.lhs)].value : nullptr;
      const Matrix* b = node.rhs >= 0 ? &nodes[static_cast<std::size_t>(node.rhs)].value : nullptr;

      switch (node.op) {
        case Op::Input:
        case Op::Constant:
          break;
        case Op::Add:
          add(node.lhs, g, dg);
          add(node.rhs, g, dg);
          break;
        case Op::Sub: {
          add(node.lhs, g, dg);
          Matrix ng = -g;
          Matrix ndg = dg ? -*dg : Matrix();
          add(node.rhs, ng, dg ? &ndg : nullptr);
          break;
        }
        case Op::Neg: {
          Matrix ng = -g;
          Matrix ndg = dg ? -*dg : Matrix();
          add(node.lhs, ng, dg ? &ndg : nullptr);
          break;
        }
        case Op::Scale: {
          const double s = node.param;
          Matrix sg = s * g;
          Matrix sdg = dg ? s * *dg : Matrix();
          add(node.lhs, sg, dg ? &sdg : nullptr);
          break;
        }
        case Op::Mul: {
          auto prod = [](double x, double y) { return x * y; };
          Matrix ga = emap_like(z, prod, g, *b);
          Matrix gb = emap_like(z, prod, g, *a);
          if (dg) {
            const Matrix& da = t(node.lhs);
            const Matrix& db = t(node.rhs);
            auto d = [](double dG, double y, double G, double dy) { return dG * y + G * dy; };
            Matrix dga = emap_like(z, d, *dg, *b, g, db);
            Matrix dgb = emap_like(z, d, *dg, *a, g, da);
            add(node.lhs, ga, &dga);
            add(node.rhs, gb, &dgb);
          } else {
            add(node.lhs, ga, nullptr);
            add(node.rhs, gb, nullptr);
          }
          break;
        }
        case Op::Div: {
          Matrix ga = emap_like(z, [](double G, double y) { return G / y; }, g, *b);
          Matrix gb = emap_like(z, [](double G, double x, double y) { return -G * x / (y * y); }, g, *a, *b);
          if (dg) {
            const Matrix& da = t(node.lhs);
            const Matrix& db = t(node.rhs);
            Matrix dga = emap_like(
                z, [](double dG, double G, double y, double dy) { return dG / y - G * dy / (y * y); },
                *dg, g, *b, db);
            Matrix dgb = emap_like(
                z,
                [](double dG, double G, double x, double y, double dx, double dy) {
                  const double y2 = y * y;
                  return -dG * x / y2 - G * dx / y2 + 2.0 * G * x * dy / (y2 * y);
                },
                *dg, g, *a, *b, da, db);
            add(node.lhs, ga, &dga);
            add(node.rhs, gb, &dgb);
          } else {
            add(node.lhs, ga, nullptr);
            add(node.rhs, gb, nullptr);
          }
          break;
        }
        case Op::MatMul: {
          Matrix ga = matmul_nt(g, *b);
          Matrix gb = matmul_tn(*a, g);
          if (dg) {
            Matrix dga = matmul_nt(*dg, *b) + matmul_nt(g, t(node.rhs));
            Matrix dgb = matmul_tn(t(node.lhs), g) + matmul_tn(*a, *dg);
            add(node.lhs, ga, &dga);
            add(node.rhs, gb, &dgb);
          } else {
            add(node.lhs, ga, nullptr);
            add(node.rhs, gb, nullptr);
          }
          break;
        }
        case Op::Transpose: {
          Matrix gt = rmopt::transpose(g);
          Matrix dgt = dg ? rmopt::transpose(*dg) : Matrix();
          add(node.lhs, gt, dg ? &dgt : nullptr);
          break;
        }
        case Op::Trace: {
          Matrix ga = g[0] * Matrix::identity(a->rows());
          Matrix dga = dg ? (*dg)[0] * Matrix::identity(a->rows()) : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Sum: {
          Matrix ga(a->rows(), a->cols(), g[0]);
          Matrix dga = dg ? Matrix(a->rows(), a->cols(), (*dg)[0]) : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::FrobeniusSq: {
          Matrix ga = (2.0 * g[0]) * *a;
          Matrix dga = dg ? (2.0 * (*dg)[0]) * *a + (2.0 * g[0]) * t(node.lhs) : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Reshape: {
          Matrix ga = rmopt::reshape(g, a->rows(), a->cols());
          Matrix dga = dg ? rmopt::reshape(*dg, a->rows(), a->cols()) : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Square: {
          Matrix ga = emap_like(z, [](double G, double x) { return 2.0 * x * G; }, g, *a);
          Matrix dga = dg ? emap_like(z, [](double dG, double G, double x, double dx) {
                              return 2.0 * (dx * G + x * dG);
                            }, *dg, g, *a, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Sqrt: {
          Matrix ga = emap_like(z, [](double G, double s) { return G / (2.0 * s); }, g, z);
          Matrix dga = dg ? emap_like(z, [](double dG, double G, double s, double dx) {
                              const double ds = dx / (2.0 * s);
                              return dG / (2.0 * s) - G * ds / (2.0 * s * s);
                            }, *dg, g, z, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::SmoothAbs: {
          const double d2 = node.param * node.param;
          Matrix ga = emap_like(z, [](double G, double x, double s) { return G * x / s; }, g, *a, z);
          Matrix dga = dg ? emap_like(z, [d2](double dG, double G, double x, double s, double dx) {
                              return dG * x / s + G * dx * d2 / (s * s * s);
                            }, *dg, g, *a, z, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Pow: {
          const double p = node.param;
          auto d1 = [p](double x) { return p == 0.0 ? 0.0 : p * std::pow(x, p - 1.0); };
          auto d2 = [p](double x) {
            const double c = p * (p - 1.0);
            return c == 0.0 ? 0.0 : c * std::pow(x, p - 2.0);
          };
          Matrix ga = emap_like(z, [&](double G, double x) { return G * d1(x); }, g, *a);
          Matrix dga = dg ? emap_like(z, [&](double dG, double G, double x, double dx) {
                              const double second = dx == 0.0 ? 0.0 : G * d2(x) * dx;
                              return dG * d1(x) + second;
                            }, *dg, g, *a, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Exp: {
          Matrix ga = emap_like(z, [](double G, double e) { return G * e; }, g, z);
          Matrix dga = dg ? emap_like(z, [](double dG, double G, double e, double dx) {
                              return (dG + G * dx) * e;
                            }, *dg, g, z, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
        case Op::Log: {
          Matrix ga = emap_like(z, [](double G, double x) { return G / x; }, g, *a);
          Matrix dga = dg ? emap_like(z, [](double dG, double G, double x, double dx) {
                              return dG / x - G * dx / (x * x);
                            }, *dg, g, *a, t(node.lhs))
                          : Matrix();
          add(node.lhs, ga, dg ? &dga : nullptr);
          break;
        }
      }
    }
  }
};

// Forward propagation of input tangents through the recorded tape.
std::vector<Matrix> forward_tangents(const std::vector<Node>& nodes,
                                     const std::vector<std::size_t>& inputs,
                                     std::span<const Matrix> direction, std::size_t last) {
  if (direction.size() != inputs.size()) {
    throw DimensionError("hess_vec: expected " + std::to_string(inputs.size()) +
                         " direction matrices, got " + std::to_string(direction.size()));
  }
  std::vector<Matrix> dv(last + 1);
  std::size_t next_input = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    const Node& node = nodes[k];
    const Matrix& z = node.value;
    auto t = [&](long id) -> const Matrix& { return dv[static_cast<std::size_t>(id)]; };
    auto val = [&](long id) -> const Matrix& { return nodes[static_cast<std::size_t>(id)].value; };
    switch (node.op) {
      case Op::Input: {
        const Matrix& d = direction[next_input++];
        require_same_shape(z, d, "hess_vec direction");
        dv[k] = d;
        break;
      }
      case Op::Constant:
        dv[k] = Matrix(z.rows(), z.cols());
        break;
      case Op::Add:
        dv[k] = emap_like(z, [](double x, double y) { return x + y; }, t(node.lhs), t(node.rhs));
        break;
      case Op::Sub:
        dv[k] = emap_like(z, [](double x, double y) { return x - y; }, t(node.lhs), t(node.rhs));
        break;
      case Op::Mul:
        dv[k] = emap_like(z, [](double dx, double y, double x, double dy) { return dx * y + x * dy; },
                          t(node.lhs), val(node.rhs), val(node.lhs), t(node.rhs));
        break;
      case Op::Div:
        dv[k] = emap_like(z, [](double dx, double x, double y, double dy) {
                  return dx / y - x * dy / (y * y);
                }, t(node.lhs), val(node.lhs), val(node.rhs), t(node.rhs));
        break;
      case Op::Scale:
        dv[k] = node.param * t(node.lhs);
        break;
      case Op::Neg:
        dv[k] = -t(node.lhs);
        break;
      case Op::MatMul:
        dv[k] = matmul(t(node.lhs), val(node.rhs)) + matmul(val(node.lhs), t(node.rhs));
        break;
      case Op::Transpose:
        dv[k] = rmopt::transpose(t(node.lhs));
        break;
      case Op::Trace:
        dv[k] = Matrix::scalar(rmopt::trace(t(node.lhs)));
        break;
      case Op::Sum:
        dv[k] = Matrix::scalar(rmopt::sum(t(node.lhs)));
        break;
      case Op::FrobeniusSq:
        dv[k] = Matrix::scalar(2.0 * rmopt::inner(val(node.lhs), t(node.lhs)));
        break;
      case Op::Reshape:
        dv[k] = rmopt::reshape(t(node.lhs), z.rows(), z.cols());
        break;
      case Op::Square:
        dv[k] = emap_like(z, [](double x, double dx) { return 2.0 * x * dx; }, val(node.lhs), t(node.lhs));
        break;
      case Op::Sqrt:
        dv[k] = emap_like(z, [](double s, double dx) { return dx / (2.0 * s); }, z, t(node.lhs));
        break;
      case Op::SmoothAbs:
        dv[k] = emap_like(z, [](double x, double s, double dx) { return x * dx / s; }, val(node.lhs), z,
                          t(node.lhs));
        break;
      case Op::Pow: {
        const double p = node.param;
        dv[k] = emap_like(z, [p](double x, double dx) {
                  return (p == 0.0 || dx == 0.0) ? 0.0 : p * std::pow(x, p - 1.0) * dx;
                }, val(node.lhs), t(node.lhs));
        break;
      }
      case Op::Exp:
        dv[k] = emap_like(z, [](double e, double dx) { return e * dx; }, z, t(node.lhs));
        break;
      case Op::Log:
        dv[k] = emap_like(z, [](double x, double dx) { return dx / x; }, val(node.lhs), t(node.lhs));
        break;
    }
  }
  return dv;
}

}  // namespace

std::vector<Matrix> Tape::gradient(const Var& output) const {
  require_scalar_output(output);
  Sweep sweep(nodes_, nullptr);
  sweep.run(output.id());
  std::vector<Matrix> grads;
  grads.reserve(inputs_.size());
  for (std::size_t id : inputs_) {
    const Matrix& v = nodes_[id].value;
    grads.push_back(id <= output.id() && sweep.touched[id] ? sweep.adj[id] : Matrix(v.rows(), v.cols()));
  }
  return grads;
}

std::vector<Matrix> Tape::hess_vec(const Var& output, std::span<const Matrix> direction) const {
  require_scalar_output(output);
  const std::vector<Matrix> dv = forward_tangents(nodes_, inputs_, direction, output.id());
  Sweep sweep(nodes_, &dv);
  sweep.run(output.id());
  std::vector<Matrix> out;
  out.reserve(inputs_.size());
  for (std::size_t id : inputs_) {
    const Matrix& v = nodes_[id].value;
    out.push_back(id <= output.id() && sweep.touched[id] ? sweep.dadj[id] : Matrix(v.rows(), v.cols()));
  }
  return out;
}

// ---- recording ops ----

Var operator+(const Var& a, const Var& b) {
  return elementwise_binary(a, b, Op::Add, [](double x, double y) { return x + y; });
}
Var operator-(const Var& a, const Var& b) {
  return elementwise_binary(a, b, Op::Sub, [](double x, double y) { return x - y; });
}
Var operator*(const Var& a, const Var& b) {
  return elementwise_binary(a, b, Op::Mul, [](double x, double y) { return x * y; });
}
Var operator/(const Var& a, const Var& b) {
  return elementwise_binary(a, b, Op::Div, [](double x, double y) { return x / y; });
}
Var operator-(const Var& a) {
  return elementwise_unary(a, Op::Neg, [](double x) { return -x; });
}

Var operator+(const Var& a, double b) { return a + a.tape().constant(b); }
Var operator+(double a, const Var& b) { return b.tape().constant(a) + b; }
Var operator-(const Var& a, double b) { return a - a.tape().constant(b); }
Var operator-(double a, const Var& b) { return b.tape().constant(a) - b; }
Var operator*(double s, const Var& a) {
  return elementwise_unary(a, Op::Scale, [s](double x) { return s * x; }, s);
}
Var operator*(const Var& a, double s) { return s * a; }
Var operator/(const Var& a, double s) { return (1.0 / s) * a; }

Var matmul(const Var& a, const Var& b) {
  Tape& tape = same_tape(a, b, Op::MatMul);
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
  return tape.record(Op::MatMul, rmopt::matmul(a.value(), b.value()), static_cast<long>(a.id()),
                     static_cast<long>(b.id()));
}

Var transpose(const Var& a) {
  return a.tape().record(Op::Transpose, rmopt::transpose(a.value()), static_cast<long>(a.id()));
}

Var trace(const Var& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("trace: operand is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return a.tape().record(Op::Trace, Matrix::scalar(rmopt::trace(a.value())), static_cast<long>(a.id()));
}

Var sum(const Var& a) {
  return a.tape().record(Op::Sum, Matrix::scalar(rmopt::sum(a.value())), static_cast<long>(a.id()));
}

Var square(const Var& a) {
  return elementwise_unary(a, Op::Square, [](double x) { return x * x; });
}

Var sqrt(const Var& a) {
  return elementwise_unary(a, Op::Sqrt, [](double x) { return std::sqrt(x); });
}

Var smooth_abs(const Var& a, double delta) {
  if (!(delta > 0.0)) throw ContractError("smooth_abs: delta must be positive");
  const double d2 = delta * delta;
  return elementwise_unary(a, Op::SmoothAbs, [d2](double x) { return std::sqrt(x * x + d2); }, delta);
}

Var pow(const Var& a, double exponent) {
  return elementwise_unary(a, Op::Pow, [exponent](double x) { return std::pow(x, exponent); }, exponent);
}

Var exp(const Var& a) {
  return elementwise_unary(a, Op::Exp, [](double x) { return std::exp(x); });
}

Var log(const Var& a) {
  return elementwise_unary(a, Op::Log, [](double x) { return std::log(x); });
}

Var frobenius_norm_sq(const Var& a) {
  return a.tape().record(Op::FrobeniusSq, Matrix::scalar(rmopt::inner(a.value(), a.value())),
                         static_cast<long>(a.id()));
}

Var reshape(const Var& a, std::size_t rows, std::size_t cols) {
  return a.tape().record(Op::Reshape, rmopt::reshape(a.value(), rows, cols), static_cast<long>(a.id()));
}

// ---- evaluation entry points ----

Recording::Recording(const Expression& f, std::span<const Matrix> inputs)
    : tape_(std::make_unique<Tape>()) {
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Matrix& m : inputs) vars.push_back(tape_->input(m));
  output_ = f(*tape_, vars);
  if (&output_.tape() != tape_.get()) throw ContractError("cost expression returned a foreign Var");
  require_scalar_output(output_);
  value_ = output_.value()[0];
}

const std::vector<Matrix>& Recording::gradient() const {
  if (!have_gradient_) {
    gradient_ = tape_->gradient(output_);
    have_gradient_ = true;
  }
  return gradient_;
}

std::vector<Matrix> Recording::hess_vec(std::span<const Matrix> direction) const {
  return tape_->hess_vec(output_, direction);
}

double evaluate(const Expression& f, std::span<const Matrix> inputs) {
  return Recording(f, inputs).value();
}

GradResult gradient(const Expression& f, std::span<const Matrix> inputs) {
  Recording rec(f, inputs);
  return {rec.value(), rec.gradient()};
}

std::vector<Matrix> hess_vec(const Expression& f, std::span<const Matrix> inputs,
                             std::span<const Matrix> direction, HessVecMode mode) {
  if (direction.size() != inputs.size()) {
    throw DimensionError("hess_vec: expected " + std::to_string(inputs.size()) +
                         " direction matrices, got " + std::to_string(direction.size()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) require_same_shape(inputs[i], direction[i], "hess_vec");
  if (mode == HessVecMode::ForwardOverReverse) return Recording(f, inputs).hess_vec(direction);

  double xnorm2 = 0.0;
  double dnorm2 = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    xnorm2 += rmopt::inner(inputs[i], inputs[i]);
    dnorm2 += rmopt::inner(direction[i], direction[i]);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::cbrt(eps) * (1.0 + std::sqrt(xnorm2)) / std::max(1.0, std::sqrt(dnorm2));

  std::vector<Matrix> plus(inputs.begin(), inputs.end());
  std::vector<Matrix> minus(inputs.begin(), inputs.end());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    plus[i] += h * direction[i];
    minus[i] -= h * direction[i];
  }
  std::vector<Matrix> gp = gradient(f, plus).grads;
  const std::vector<Matrix> gm = gradient(f, minus).grads;
  for (std::size_t i = 0; i < gp.size(); ++i) {
    gp[i] -= gm[i];
    gp[i] /= 2.0 * h;
  }
  return gp;
}

}  // namespace rmopt::ad
