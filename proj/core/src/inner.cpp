#include "mea/inner.hpp"

#include <cmath>
#include <sstream>

namespace mea {

double inner_sgd_constant(double lipschitz, double p, double domain_diameter,
                          double weak_conv) {
  return (lipschitz + p * domain_diameter) / (p - weak_conv);
}

double stability_beta(double p, double weak_conv) {
  if (weak_conv == 0.0) return p;
  return std::max(p, p * weak_conv / (p - weak_conv));
}

InnerResult inner_sgd(const InnerProblem& problem, const InnerConfig& cfg, const ParamVec& w0,
                      RngStream& index_stream) {
  const double l = problem.loss->weak_convexity();
  if (!(problem.p > l)) throw std::invalid_argument("inner_sgd: inner problem not strongly convex (p <= l)");
  if (cfg.steps < 1) throw std::invalid_argument("inner_sgd: N >= 1 required");

  const double rho = problem.p - l;
  const std::size_t n = problem.data->size();
  ParamVec w = project(w0, problem.ball);
  for (std::int64_t s = 1; s <= cfg.steps; ++s) {
    const std::size_t i = index_stream.uniform_index(n);
    const ParamVec g =
        problem.loss->subgrad(w, (*problem.data)[i]) + problem.p * (w - problem.center);
    double step = cfg.c0;
    if (cfg.schedule == InnerScheduleKind::strongly_convex_decay)
      step = std::min(cfg.c0, 1.0 / (rho * static_cast<double>(s)));
    w = project(w - step * g, problem.ball);
  }

  InnerResult res;
  res.w_out = std::move(w);
  const double c1 = inner_sgd_constant(problem.loss->lipschitz(), problem.p,
                                       problem.ball.diameter(), l);
  res.certified_eps = c1 / std::sqrt(static_cast<double>(cfg.steps));
  res.steps_used = cfg.steps;
  return res;
}

InnerResult inner_subgrad_fixed(const InnerProblem& problem, double c, std::int64_t steps,
                                const ParamVec& w0, std::vector<ParamVec>* trace) {
  if (!(problem.p > 0.0)) throw std::invalid_argument("inner_subgrad_fixed: p > 0 required");
  if (c < 0.0) throw std::invalid_argument("inner_subgrad_fixed: step must be >= 0");
  if (c > 1.0 / problem.p)
    throw std::invalid_argument("inner_subgrad_fixed: c > 1/p, contraction lost");

  ParamVec w = project(w0, problem.ball);
  if (trace) trace->push_back(w);
  for (std::int64_t t = 0; t < steps; ++t) {
    const ParamVec g = problem.subgrad(w);
    w = project(w - c * g, problem.ball);
    if (trace) trace->push_back(w);
  }

  const double lip = problem.loss->lipschitz();
  const double l = problem.loss->weak_convexity();
  const double delta0 = problem.ball.diameter() * problem.ball.diameter();
  double certified;
  if (l == 0.0) {
    // Delta_{t+1} <= (1 - cp) Delta_t + c^2 L^2, floor c L^2 / p.
    const double floor = c * lip * lip / problem.p;
    const double transient = std::pow(1.0 - c * problem.p, static_cast<double>(steps)) * delta0;
    certified = std::sqrt(std::max(transient, floor) + floor);
  } else {
    // Weakly-convex variant: contraction (1 - 2c(p-l)) with the full K
    // subgradient norm, floor c (L + p D_W)^2 / (2(p-l)).
    const double rho = problem.p - l;
    if (!(rho > 0.0)) throw std::invalid_argument("inner_subgrad_fixed: p > l required");
    const double gk = lip + problem.p * problem.ball.diameter();
    const double floor = c * gk * gk / (2.0 * rho);
    const double kappa = std::max(0.0, 1.0 - 2.0 * c * rho);
    const double transient = std::pow(kappa, static_cast<double>(steps)) * delta0;
    certified = std::sqrt(std::max(transient, floor) + floor);
  }

  InnerResult res;
  res.w_out = std::move(w);
  res.certified_eps = certified;
  res.steps_used = steps;
  return res;
}

InnerResult inner_exact(const InnerProblem& problem) {
  if (!problem.loss->has_exact_prox())
    throw std::logic_error("inner_exact: no exact prox available for " + problem.loss->name());
  InnerResult res;
  res.w_out = problem.loss->exact_prox(problem.center, problem.p, *problem.data);
  res.certified_eps = 1e-12;
  res.steps_used = 0;
  return res;
}

namespace {

// Step and step count that drive the inner_subgrad_fixed certificate to the
// requested tolerance: floor <= tol^2/2 fixes c, the transient term fixes t.
struct FixedStepPlan {
  double c = 0.0;
  double steps = 0.0;
};

FixedStepPlan plan_fixed_step(const InnerProblem& problem, double tol) {
  const double l = problem.loss->weak_convexity();
  const double lip = problem.loss->lipschitz();
  const double delta0 = problem.ball.diameter() * problem.ball.diameter();
  const double log_term = std::log(std::max(2.0 * delta0 / (tol * tol), 2.0));
  FixedStepPlan plan;
  if (l == 0.0) {
    plan.c = std::min(1.0 / problem.p, problem.p * tol * tol / (2.0 * lip * lip));
    plan.steps = log_term / (plan.c * problem.p);
  } else {
    const double rho = problem.p - l;
    const double gk = lip + problem.p * problem.ball.diameter();
    plan.c = std::min(1.0 / problem.p, rho * tol * tol / (gk * gk));
    plan.steps = log_term / (2.0 * plan.c * rho);
  }
  return plan;
}

}  // namespace

InnerResult inner_to_tolerance(const InnerProblem& problem, double tol, std::int64_t max_steps) {
  if (problem.loss->has_exact_prox()) {
    InnerResult res = inner_exact(problem);
    res.certified_eps = std::min(res.certified_eps, tol);
    return res;
  }
  if (!(problem.p > problem.loss->weak_convexity()))
    throw std::invalid_argument("inner_to_tolerance: p > l required");

  const FixedStepPlan plan = plan_fixed_step(problem, tol);
  if (plan.steps > static_cast<double>(max_steps)) {
    // Bisect for the tolerance the budget does admit, for the error message.
    double lo = tol;
    double hi = problem.ball.diameter();
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (plan_fixed_step(problem, mid).steps > static_cast<double>(max_steps) ? lo : hi) = mid;
    }
    std::ostringstream msg;
    msg << "inner_to_tolerance: tol " << tol << " unreachable within " << max_steps
        << " steps; achievable ~" << hi;
    throw std::runtime_error(msg.str());
  }
  const auto steps = static_cast<std::int64_t>(plan.steps) + 1;
  return inner_subgrad_fixed(problem, plan.c, steps, problem.center);
}

}  // namespace mea
