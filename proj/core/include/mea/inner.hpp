#pragma once

#include "mea/loss.hpp"

#include <cstdint>
#include <vector>

namespace mea {

// Inner problem: min_{w in ball} K(w, u; S) = (1/n) sum_i h(w; z_i) + (p/2)||w - u||^2.
// Strongly convex with modulus p - l.
struct InnerProblem {
  const LossModel* loss = nullptr;
  const Dataset* data = nullptr;
  ParamVec center;  // u
  double p = 1.0;
  DomainBall ball{1.0};

  InnerProblem(const LossModel& loss_, const Dataset& data_, ParamVec center_, double p_,
               DomainBall ball_)
      : loss(&loss_), data(&data_), center(std::move(center_)), p(p_), ball(ball_) {}

  double eval(const ParamVec& w) const {
    return loss->empirical_risk(w, *data) + 0.5 * p * (w - center).squaredNorm();
  }
  ParamVec subgrad(const ParamVec& w) const {
    return loss->empirical_subgrad(w, *data) + p * (w - center);
  }
  double strong_convexity() const { return p - loss->weak_convexity(); }
};

enum class InnerScheduleKind { strongly_convex_decay, fixed_step };

struct InnerConfig {
  std::int64_t steps = 1000;  // N
  InnerScheduleKind schedule = InnerScheduleKind::strongly_convex_decay;
  double c0 = 1.0;  // step cap (decay) or the fixed step itself
};

struct InnerResult {
  ParamVec w_out;
  double certified_eps = 0.0;  // certified bound on ||w_out - w(u;S)||
  std::int64_t steps_used = 0;
};

// C_1 = (L + p D_W) / (p - l): the constant in the E||w_N - w(u)||^2 <= C_1^2/N rate.
double inner_sgd_constant(double lipschitz, double p, double domain_diameter, double weak_conv);

// beta = max{p, p l / (p - l)}: the gradient-Lipschitz constant of the
// envelope, and the rate constant of the diminishing outer schedule.
double stability_beta(double p, double weak_conv);

// Stochastic subgradient descent on K with one uniformly drawn sample per
// step, c_s = min(c0, 1/((p-l)s)) decay and projection after every step.
// certified_eps = C_1 / sqrt(N).
InnerResult inner_sgd(const InnerProblem& problem, const InnerConfig& cfg, const ParamVec& w0,
                      RngStream& index_stream);

// Full-batch subgradient descent with fixed step c: the h-part subgradient
// plus the exact gradient of the quadratic. Requires c <= 1/p. The squared
// distance to the minimizer contracts to the c L^2 / p floor, which yields
// the certificate. `trace` (optional) records every iterate for auditing.
InnerResult inner_subgrad_fixed(const InnerProblem& problem, double c, std::int64_t steps,
                                const ParamVec& w0, std::vector<ParamVec>* trace = nullptr);

// Delegates to the loss's exact prox. certified_eps reported as 1e-12
// (floating round-off).
InnerResult inner_exact(const InnerProblem& problem);

// Drives inner_subgrad_fixed to the requested distance tolerance, choosing
// the step from the contraction analysis. Uses the exact prox when present.
// Throws when the tolerance is unreachable within max_steps, reporting the
// achievable tolerance in the message.
InnerResult inner_to_tolerance(const InnerProblem& problem, double tol,
                               std::int64_t max_steps = 4'000'000);

}  // namespace mea
