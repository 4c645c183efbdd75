#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>

#include "rmopt/autodiff.hpp"
#include "rmopt/manifold.hpp"

namespace rmopt {

using CostFunction = std::function<double(const Point&)>;
using GradientFunction = std::function<Element(const Point&)>;
/// Euclidean Hessian at x applied to u.
using HessianFunction = std::function<Element(const Point&, const Tangent&)>;

enum class DerivativeProvider { Autodiff, UserSupplied, FiniteDifference };

/// A manifold, a cost on it, and where the cost's Euclidean derivatives
/// come from. Costs on quotient manifolds are written in terms of the
/// representative (e.g. Y for PSDFixedRank). Costs on product manifolds
/// take one matrix per part, in order.
///
/// Immutable; evaluation state lives in an Evaluator.
class Problem {
 public:
  /// Derivatives by reverse-mode AD of `cost`. The expression receives one
  /// Var per part of the point.
  static Problem autodiff(ManifoldPtr manifold, ad::Expression cost,
                          ad::HessVecMode hvp = ad::HessVecMode::ForwardOverReverse);

  /// User-provided Euclidean gradient and, optionally, Hessian. A supplied
  /// Hessian must pass a symmetry check at one random point (relative
  /// tolerance 1e-5) or ContractError is thrown.
  static Problem user_supplied(ManifoldPtr manifold, CostFunction cost, GradientFunction egrad,
                               HessianFunction ehess = {});

  /// Cost only; derivatives by central finite differences.
  static Problem finite_difference(ManifoldPtr manifold, CostFunction cost);

  const Manifold& manifold() const noexcept { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const noexcept { return manifold_; }
  DerivativeProvider provider() const noexcept { return provider_; }

  /// True when Hessian-vector products are exact up to rounding rather
  /// than finite-difference approximations.
  bool exact_hessian() const noexcept;

  const ad::Expression* expression() const noexcept { return expression_ ? &*expression_ : nullptr; }
  ad::HessVecMode hvp_mode() const noexcept { return hvp_mode_; }
  const CostFunction& cost_function() const noexcept { return cost_; }
  const GradientFunction& gradient_function() const noexcept { return egrad_; }
  const HessianFunction& hessian_function() const noexcept { return ehess_; }

 private:
  Problem(ManifoldPtr manifold, DerivativeProvider provider);

  ManifoldPtr manifold_;
  DerivativeProvider provider_;
  std::optional<ad::Expression> expression_;
  ad::HessVecMode hvp_mode_ = ad::HessVecMode::ForwardOverReverse;
  CostFunction cost_;
  GradientFunction egrad_;
  HessianFunction ehess_;
};

/// Cost of an AD expression as a plain function of a point.
CostFunction cost_of(ad::Expression expression);

/// Caches cost and derivatives at the most recent point so that repeated
/// requests at the same x (typical inside truncated CG) share one
/// evaluation. Owned by a single solver run; not thread-safe.
class Evaluator {
 public:
  explicit Evaluator(const Problem& problem);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const Problem& problem() const noexcept { return problem_; }
  const Manifold& manifold() const noexcept { return problem_.manifold(); }

  double cost(const Point& x);
  const Element& euclidean_gradient(const Point& x);
  const Tangent& gradient(const Point& x);
  Tangent hess_vec(const Point& x, const Tangent& u);

  std::size_t cost_evaluations() const noexcept { return cost_evals_; }
  std::size_t gradient_evaluations() const noexcept { return grad_evals_; }
  std::size_t hessian_evaluations() const noexcept { return hess_evals_; }

 private:
  struct Cache;
  Cache& at(const Point& x);
  Element euclidean_hess_vec(const Point& x, const Tangent& u);

  const Problem& problem_;
  std::unique_ptr<Cache> cache_;
  std::size_t cost_evals_ = 0;
  std::size_t grad_evals_ = 0;
  std::size_t hess_evals_ = 0;
};

/// egrad2rgrad of the provider's Euclidean gradient. Non-finite gradients
/// raise EvaluationError.
Tangent riemannian_gradient(const Problem& problem, const Point& x);
Tangent riemannian_hess_vec(const Problem& problem, const Point& x, const Tangent& u);

/// Central-difference Euclidean gradient of `cost`, step √ε·(1+‖x‖_F).
Element finite_difference_gradient(const CostFunction& cost, const Point& x);

}  // namespace rmopt
