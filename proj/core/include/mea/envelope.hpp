#pragma once

#include "mea/inner.hpp"

#include <vector>

namespace mea {

// One high-accuracy evaluation of the Moreau envelope
// M(u;S) = min_{w in W} (1/n) sum_i h(w; z_i) + (p/2)||w - u||^2.
struct EnvelopeEval {
  ParamVec u;
  double M_value = 0.0;
  ParamVec w_star;
  ParamVec grad;  // p (u - w_star)
  double solve_tol = 0.0;
};

EnvelopeEval envelope(const ParamVec& u, double p, const LossModel& loss, const Dataset& s,
                      const DomainBall& ball, double tol = 1e-10);

// Max deviation between the central finite difference of M at u and the
// analytic gradient p(u - w(u;S)).
double gradient_fd_deviation(const ParamVec& u, double p, const LossModel& loss,
                             const Dataset& s, const DomainBall& ball, double fd_step = 1e-4,
                             double inner_tol = 1e-8);

// Finite-difference gradient identity over random interior probes.
CheckResult check_gradient_fd(double p, const LossModel& loss, const Dataset& s,
                              const DomainBall& ball, int probes, RngStream& rng,
                              double tol = 1e-4);

// Midpoint convexity of M(u) + (pl/(p-l))||u||^2/2 along random interior
// segments (plain convexity of M when l = 0).
CheckResult check_envelope_curvature(double p, const LossModel& loss, const Dataset& s,
                                     const DomainBall& ball, int segments, RngStream& rng,
                                     double tol = 1e-8);

// ||grad M(u1) - grad M(u2)|| <= max{p, pl/(p-l)} ||u1 - u2|| over random pairs.
CheckResult check_gradient_lipschitz(double p, const LossModel& loss, const Dataset& s,
                                     const DomainBall& ball, int pairs, RngStream& rng,
                                     double tol = 1e-8);

// M(u;S) <= R_S(u), with equality at the empirical minimizer.
CheckResult check_envelope_upper_bound(double p, const LossModel& loss, const Dataset& s,
                                       const DomainBall& ball, int probes, RngStream& rng,
                                       double tol = 1e-9);

// Pointwise monotonicity of the envelope in p at fixed u.
CheckResult check_envelope_monotone_in_p(double p1, double p2, const LossModel& loss,
                                         const Dataset& s, const DomainBall& ball, int probes,
                                         RngStream& rng, double tol = 1e-12);

struct InnerStabilityReport {
  double measured = 0.0;        // ||w(u;S) - w(u;S')||
  double bound = 0.0;           // 2 L / (n (p - l)), certified-L variant
  double bound_alt = 0.0;       // same with the loss's alternate constant; 0 if none
  bool pass = false;
};

// Inner stability on one neighbor pair: the prox divergence against the
// 2L/(n(p-l)) certificate. Throws when S and S' are not neighbors.
InnerStabilityReport check_inner_stability(const ParamVec& u, double p, const LossModel& loss,
                                           const Dataset& s, const Dataset& s_prime,
                                           const DomainBall& ball, double tol = 1e-9);

// Inner stability over random (u, neighbor pair) draws.
CheckResult check_inner_stability_battery(double p, const LossModel& loss, Eigen::Index d,
                                          std::size_t n, const DomainBall& ball, int trials,
                                          RngStream& rng, double tol = 1e-9);

// The full verification battery run by the check-oracles subcommand:
// loss probes plus every envelope identity on the standard instances.
std::vector<CheckResult> run_oracle_battery(std::uint64_t seed);

}  // namespace mea
