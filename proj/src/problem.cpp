#include "rmopt/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rmopt/errors.hpp"

namespace rmopt {
namespace {

double point_norm(const Element& x) { return frobenius_norm(x); }

std::string describe(const Point& x) {
  std::ostringstream os;
  os << "point with " << x.num_parts() << " part(s)";
  if (x.num_parts() > 0 && x.part(0).size() <= 16) os << ", first part " << x.part(0);
  return os.str();
}

void require_finite(const Element& e, const Point& x, const char* what) {
  if (!all_finite(e)) throw EvaluationError(std::string("non-finite ") + what + " at " + describe(x));
}

Element finite_difference_hess_vec(const GradientFunction& egrad, const Point& x, const Tangent& u) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::cbrt(eps) * (1.0 + point_norm(x)) / std::max(1.0, point_norm(u));
  Element out = egrad(axpy(x, h, u));
  out -= egrad(axpy(x, -h, u));
  out *= 1.0 / (2.0 * h);
  return out;
}

// Cost-only Hessian-vector product: the mixed second difference
// [f(x+h·e_i+k·u) − f(x+h·e_i−k·u) − f(x−h·e_i+k·u) + f(x−h·e_i−k·u)] / 4hk.
// Differencing two difference gradients instead would amplify their
// rounding noise by 1/h; here the noise is ε·|f|/(hk) with h, k ~ ε^{1/4}.
Element mixed_difference_hess_vec(const CostFunction& cost, const Point& x, const Tangent& u) {
  const double root = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
  const double h = root * (1.0 + point_norm(x));
  const double k = root * (1.0 + point_norm(x)) / std::max(1.0, point_norm(u));
  const Point xp = axpy(x, k, u);
  const Point xm = axpy(x, -k, u);
  Element out = zeros_like(x);
  Point pp = xp, pm = xm;
  for (std::size_t p = 0; p < x.num_parts(); ++p) {
    for (std::size_t i = 0; i < x.part(p).size(); ++i) {
      const double op = xp.part(p)[i], om = xm.part(p)[i];
      pp.part(p)[i] = op + h;
      pm.part(p)[i] = om + h;
      const double fpp = cost(pp), fmp = cost(pm);
      pp.part(p)[i] = op - h;
      pm.part(p)[i] = om - h;
      const double fpm = cost(pp), fmm = cost(pm);
      pp.part(p)[i] = op;
      pm.part(p)[i] = om;
      out.part(p)[i] = ((fpp - fpm) - (fmp - fmm)) / (4.0 * h * k);
    }
  }
  return out;
}

}  // namespace

Problem::Problem(ManifoldPtr manifold, DerivativeProvider provider)
    : manifold_(std::move(manifold)), provider_(provider) {
  if (!manifold_) throw ContractError("Problem: manifold is null");
}

Problem Problem::autodiff(ManifoldPtr manifold, ad::Expression cost, ad::HessVecMode hvp) {
  if (!cost) throw ContractError("Problem: empty cost expression");
  Problem p(std::move(manifold), DerivativeProvider::Autodiff);
  p.cost_ = cost_of(cost);
  p.expression_ = std::move(cost);
  p.hvp_mode_ = hvp;
  return p;
}

Problem Problem::user_supplied(ManifoldPtr manifold, CostFunction cost, GradientFunction egrad,
                               HessianFunction ehess) {
  if (!cost || !egrad) throw ContractError("Problem: user-supplied problems need a cost and a gradient");
  Problem p(std::move(manifold), DerivativeProvider::UserSupplied);
  p.cost_ = std::move(cost);
  p.egrad_ = std::move(egrad);
  p.ehess_ = std::move(ehess);
  if (p.ehess_) {
    const Manifold& m = *p.manifold_;
    Rng rng(0x5eed);
    const Point x = m.rand(rng);
    const Tangent u = m.randvec(x, rng);
    const Tangent v = m.randvec(x, rng);
    const Element g = p.egrad_(x);
    const double huv = m.inner(x, m.ehess2rhess(x, g, p.ehess_(x, u), u), v);
    const double hvu = m.inner(x, m.ehess2rhess(x, g, p.ehess_(x, v), v), u);
    if (std::abs(huv - hvu) > 1e-5 * std::max({1.0, std::abs(huv), std::abs(hvu)})) {
      throw ContractError("Problem: supplied Hessian is not symmetric (<Hu,v> = " + std::to_string(huv) +
                          ", <Hv,u> = " + std::to_string(hvu) + ")");
    }
  }
  return p;
}

Problem Problem::finite_difference(ManifoldPtr manifold, CostFunction cost) {
  if (!cost) throw ContractError("Problem: empty cost function");
  Problem p(std::move(manifold), DerivativeProvider::FiniteDifference);
  p.cost_ = std::move(cost);
  return p;
}

bool Problem::exact_hessian() const noexcept {
  switch (provider_) {
    case DerivativeProvider::Autodiff: return hvp_mode_ == ad::HessVecMode::ForwardOverReverse;
    case DerivativeProvider::UserSupplied: return static_cast<bool>(ehess_);
    case DerivativeProvider::FiniteDifference: return false;
  }
  return false;
}

CostFunction cost_of(ad::Expression expression) {
  return [f = std::move(expression)](const Point& x) { return ad::evaluate(f, x.parts()); };
}

Element finite_difference_gradient(const CostFunction& cost, const Point& x) {
  const double h = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + point_norm(x));
  Element grad = zeros_like(x);
  Point probe = x;
  for (std::size_t p = 0; p < x.num_parts(); ++p) {
    for (std::size_t i = 0; i < x.part(p).size(); ++i) {
      const double orig = probe.part(p)[i];
      probe.part(p)[i] = orig + h;
      const double fp = cost(probe);
      probe.part(p)[i] = orig - h;
      const double fm = cost(probe);
      probe.part(p)[i] = orig;
      grad.part(p)[i] = (fp - fm) / (2.0 * h);
    }
  }
  return grad;
}

// ---- Evaluator ----

struct Evaluator::Cache {
  Point x;
  bool valid = false;
  std::optional<double> cost;
  std::optional<Element> egrad;
  std::optional<Tangent> rgrad;
  std::unique_ptr<ad::Recording> recording;
};

Evaluator::Evaluator(const Problem& problem) : problem_(problem), cache_(std::make_unique<Cache>()) {}
Evaluator::~Evaluator() = default;

Evaluator::Cache& Evaluator::at(const Point& x) {
  if (!cache_->valid || !(cache_->x == x)) {
    manifold().check_layout(x, "evaluate");
    *cache_ = Cache{};
    cache_->x = x;
    cache_->valid = true;
  }
  return *cache_;
}

double Evaluator::cost(const Point& x) {
  Cache& c = at(x);
  if (!c.cost) {
    ++cost_evals_;
    if (problem_.provider() == DerivativeProvider::Autodiff) {
      c.recording = std::make_unique<ad::Recording>(*problem_.expression(), x.parts());
      c.cost = c.recording->value();
    } else {
      c.cost = problem_.cost_function()(x);
    }
  }
  return *c.cost;
}

const Element& Evaluator::euclidean_gradient(const Point& x) {
  Cache& c = at(x);
  if (!c.egrad) {
    ++grad_evals_;
    switch (problem_.provider()) {
      case DerivativeProvider::Autodiff:
        cost(x);
        c.egrad = Element(c.recording->gradient());
        break;
      case DerivativeProvider::UserSupplied:
        c.egrad = problem_.gradient_function()(x);
        break;
      case DerivativeProvider::FiniteDifference:
        c.egrad = finite_difference_gradient(problem_.cost_function(), x);
        break;
    }
    manifold().check_layout(*c.egrad, "egrad");
    require_finite(*c.egrad, x, "Euclidean gradient");
  }
  return *c.egrad;
}

const Tangent& Evaluator::gradient(const Point& x) {
  Cache& c = at(x);
  if (!c.rgrad) c.rgrad = manifold().egrad2rgrad(x, euclidean_gradient(x));
  return *c.rgrad;
}

Element Evaluator::euclidean_hess_vec(const Point& x, const Tangent& u) {
  switch (problem_.provider()) {
    case DerivativeProvider::Autodiff:
      if (problem_.hvp_mode() == ad::HessVecMode::ForwardOverReverse) {
        cost(x);
        return Element(at(x).recording->hess_vec(u.parts()));
      }
      return Element(ad::hess_vec(*problem_.expression(), x.parts(), u.parts(), ad::HessVecMode::FiniteDifference));
    case DerivativeProvider::UserSupplied:
      if (problem_.hessian_function()) return problem_.hessian_function()(x, u);
      return finite_difference_hess_vec(problem_.gradient_function(), x, u);
    case DerivativeProvider::FiniteDifference:
      return mixed_difference_hess_vec(problem_.cost_function(), x, u);
  }
  throw ContractError("unknown derivative provider");
}

Tangent Evaluator::hess_vec(const Point& x, const Tangent& u) {
  manifold().check_layout(u, "hess_vec");
  const Element& eg = euclidean_gradient(x);
  ++hess_evals_;
  Element eh = euclidean_hess_vec(x, u);
  manifold().check_layout(eh, "ehess");
  require_finite(eh, x, "Euclidean Hessian-vector product");
  return manifold().ehess2rhess(x, eg, eh, u);
}

Tangent riemannian_gradient(const Problem& problem, const Point& x) {
  Evaluator ev(problem);
  return ev.gradient(x);
}

Tangent riemannian_hess_vec(const Problem& problem, const Point& x, const Tangent& u) {
  Evaluator ev(problem);
  return ev.hess_vec(x, u);
}

}  // namespace rmopt
