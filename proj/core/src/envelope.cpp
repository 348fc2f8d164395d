#include "mea/envelope.hpp"

#include "mea/losses.hpp"

#include <cmath>

namespace mea {

namespace {

// Envelope identities differentiate w(u), which is only valid off the
// constraint boundary; probes stay well inside the ball.
ParamVec interior_probe(const DomainBall& ball, Eigen::Index d, RngStream& rng,
                        double fraction = 0.25) {
  ParamVec v = rng.normal_vector(d);
  const double norm = v.norm();
  if (norm == 0.0) return ParamVec::Zero(d);
  const double r =
      fraction * ball.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return v * (r / norm);
}

}  // namespace

EnvelopeEval envelope(const ParamVec& u, double p, const LossModel& loss, const Dataset& s,
                      const DomainBall& ball, double tol) {
  if (!(p > loss.weak_convexity())) throw std::invalid_argument("envelope: p > l required");
  InnerProblem problem(loss, s, u, p, ball);
  const InnerResult inner = inner_to_tolerance(problem, tol);
  EnvelopeEval eval;
  eval.u = u;
  eval.w_star = inner.w_out;
  eval.M_value = loss.empirical_risk(inner.w_out, s) + 0.5 * p * (inner.w_out - u).squaredNorm();
  eval.grad = p * (u - inner.w_out);
  eval.solve_tol = inner.certified_eps;
  return eval;
}

double gradient_fd_deviation(const ParamVec& u, double p, const LossModel& loss,
                             const Dataset& s, const DomainBall& ball, double fd_step,
                             double inner_tol) {
  const EnvelopeEval at_u = envelope(u, p, loss, s, ball, inner_tol);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    ParamVec up = u;
    ParamVec dn = u;
    up[j] += fd_step;
    dn[j] -= fd_step;
    const double m_up = envelope(up, p, loss, s, ball, inner_tol).M_value;
    const double m_dn = envelope(dn, p, loss, s, ball, inner_tol).M_value;
    const double fd = (m_up - m_dn) / (2.0 * fd_step);
    worst = std::max(worst, std::abs(fd - at_u.grad[j]));
  }
  return worst;
}

CheckResult check_gradient_fd(double p, const LossModel& loss, const Dataset& s,
                              const DomainBall& ball, int probes, RngStream& rng, double tol) {
  CheckResult res;
  res.name = loss.name() + ".envelope_gradient_fd";
  res.samples = probes;
  res.allowed = tol;
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const ParamVec u = interior_probe(ball, loss.dim(), rng);
    worst = std::max(worst, gradient_fd_deviation(u, p, loss, s, ball));
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult check_envelope_curvature(double p, const LossModel& loss, const Dataset& s,
                                     const DomainBall& ball, int segments, RngStream& rng,
                                     double tol) {
  CheckResult res;
  const double l = loss.weak_convexity();
  const double modulus = l == 0.0 ? 0.0 : p * l / (p - l);
  res.name = loss.name() + ".envelope_weak_convexity";
  res.samples = segments;
  res.allowed = tol;
  const auto reg = [&](const ParamVec& u) {
    return envelope(u, p, loss, s, ball).M_value + 0.5 * modulus * u.squaredNorm();
  };
  double worst = -1e300;
  for (int i = 0; i < segments; ++i) {
    const ParamVec a = interior_probe(ball, loss.dim(), rng);
    const ParamVec b = interior_probe(ball, loss.dim(), rng);
    const ParamVec m = 0.5 * (a + b);
    worst = std::max(worst, reg(m) - 0.5 * (reg(a) + reg(b)));
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult check_gradient_lipschitz(double p, const LossModel& loss, const Dataset& s,
                                     const DomainBall& ball, int pairs, RngStream& rng,
                                     double tol) {
  CheckResult res;
  const double constant = stability_beta(p, loss.weak_convexity());
  res.name = loss.name() + ".envelope_gradient_lipschitz";
  res.samples = pairs;
  res.allowed = tol;
  double worst = -1e300;
  for (int i = 0; i < pairs; ++i) {
    const ParamVec u1 = interior_probe(ball, loss.dim(), rng);
    const ParamVec u2 = interior_probe(ball, loss.dim(), rng);
    const ParamVec g1 = envelope(u1, p, loss, s, ball).grad;
    const ParamVec g2 = envelope(u2, p, loss, s, ball).grad;
    worst = std::max(worst, (g1 - g2).norm() - constant * (u1 - u2).norm());
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult check_envelope_upper_bound(double p, const LossModel& loss, const Dataset& s,
                                       const DomainBall& ball, int probes, RngStream& rng,
                                       double tol) {
  CheckResult res;
  res.name = loss.name() + ".envelope_upper_bound";
  res.samples = probes;
  res.allowed = tol;
  double worst = -1e300;
  for (int i = 0; i < probes; ++i) {
    const ParamVec u = interior_probe(ball, loss.dim(), rng);
    const EnvelopeEval e = envelope(u, p, loss, s, ball);
    worst = std::max(worst, e.M_value - loss.empirical_risk(u, s));
  }
  if (auto minimizer = loss.empirical_minimizer(s)) {
    const EnvelopeEval e = envelope(*minimizer, p, loss, s, ball);
    worst = std::max(worst, std::abs(e.M_value - loss.empirical_risk(*minimizer, s)));
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult check_envelope_monotone_in_p(double p1, double p2, const LossModel& loss,
                                         const Dataset& s, const DomainBall& ball, int probes,
                                         RngStream& rng, double tol) {
  if (!(p1 < p2)) throw std::invalid_argument("check_envelope_monotone_in_p: p1 < p2 required");
  CheckResult res;
  res.name = loss.name() + ".envelope_monotone_in_p";
  res.samples = probes;
  res.allowed = tol;
  double worst = -1e300;
  for (int i = 0; i < probes; ++i) {
    const ParamVec u = interior_probe(ball, loss.dim(), rng);
    const double m1 = envelope(u, p1, loss, s, ball).M_value;
    const double m2 = envelope(u, p2, loss, s, ball).M_value;
    worst = std::max(worst, m1 - m2);
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

InnerStabilityReport check_inner_stability(const ParamVec& u, double p, const LossModel& loss,
                                           const Dataset& s, const Dataset& s_prime,
                                           const DomainBall& ball, double tol) {
  if (hamming_distance(s, s_prime) > 1)
    throw std::invalid_argument("check_inner_stability: datasets are not neighbors");
  const double l = loss.weak_convexity();
  const EnvelopeEval a = envelope(u, p, loss, s, ball, tol);
  const EnvelopeEval b = envelope(u, p, loss, s_prime, ball, tol);
  InnerStabilityReport rep;
  rep.measured = (a.w_star - b.w_star).norm();
  const double denom = static_cast<double>(s.size()) * (p - l);
  rep.bound = 2.0 * loss.lipschitz() / denom;
  rep.bound_alt = loss.lipschitz_alt() ? 2.0 * *loss.lipschitz_alt() / denom : 0.0;
  rep.pass = rep.measured <= rep.bound + 2.0 * std::max(a.solve_tol, b.solve_tol);
  return rep;
}

CheckResult check_inner_stability_battery(double p, const LossModel& loss, Eigen::Index d,
                                          std::size_t n, const DomainBall& ball, int trials,
                                          RngStream& rng, double tol) {
  CheckResult res;
  res.name = loss.name() + ".inner_stability";
  res.samples = trials;
  res.allowed = tol;
  double worst = -1e300;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) samples.push_back(loss.draw_sample(rng));
    Dataset s(std::move(samples));
    const std::size_t idx = rng.uniform_index(n);
    Dataset s_prime = make_neighbor(s, idx, loss.draw_sample(rng));
    const ParamVec u = interior_probe(ball, d, rng);
    const InnerStabilityReport rep = check_inner_stability(u, p, loss, s, s_prime, ball);
    worst = std::max(worst, rep.measured - rep.bound);
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

std::vector<CheckResult> run_oracle_battery(std::uint64_t seed) {
  std::vector<CheckResult> results;

  {  // Convex regime: the L1 toy.
    const Eigen::Index d = 5;
    L1Loss loss(d);
    DomainBall ball(10.0);
    RngStream data_rng(seed, "oracles-l1-data");
    const Dataset s = sample_gaussian_dataset(d, 40, seed, "oracles-l1-data");
    RngStream rng(seed, "oracles-l1");
    results.push_back(lipschitz_probe(loss, ball, 1000, rng));
    results.push_back(weak_convexity_probe(loss, ball, 1000, rng));
    results.push_back(subgradient_inequality_probe(loss, ball, 1000, rng));
    results.push_back(check_gradient_fd(1.0, loss, s, ball, 100, rng));
    results.push_back(check_envelope_curvature(1.0, loss, s, ball, 100, rng));
    results.push_back(check_gradient_lipschitz(1.0, loss, s, ball, 1000, rng));
    results.push_back(check_envelope_upper_bound(1.0, loss, s, ball, 100, rng));
    results.push_back(check_envelope_monotone_in_p(0.5, 1.0, loss, s, ball, 50, rng));
    results.push_back(check_inner_stability_battery(0.5, loss, d, 10, ball, 100, rng));
  }

  {  // Weakly-convex regime: the 1-d max-of-quadratics family, l = 0.5, p = 1.
    DomainBall ball(10.0);
    MaxQuadLoss loss = make_max_quad_1d(0.5, ball.radius);
    RngStream rng(seed, "oracles-maxquad");
    std::vector<Sample> samples;
    for (int i = 0; i < 16; ++i) samples.push_back(loss.draw_sample(rng));
    const Dataset s(std::move(samples));
    results.push_back(lipschitz_probe(loss, ball, 1000, rng));
    results.push_back(weak_convexity_probe(loss, ball, 1000, rng));
    results.push_back(subgradient_inequality_probe(loss, ball, 1000, rng));
    results.push_back(check_gradient_fd(1.0, loss, s, ball, 100, rng));
    results.push_back(check_envelope_curvature(1.0, loss, s, ball, 100, rng));
    results.push_back(check_gradient_lipschitz(1.0, loss, s, ball, 1000, rng));
    results.push_back(check_envelope_upper_bound(1.0, loss, s, ball, 100, rng));
    results.push_back(check_envelope_monotone_in_p(0.75, 1.0, loss, s, ball, 50, rng));
    results.push_back(check_inner_stability_battery(1.0, loss, 1, 10, ball, 100, rng));
  }

  {  // Adversarial linear/absolute loss: probe checks only (no exact prox).
    const Eigen::Index d = 5;
    AdvLinearAbsLoss loss(d, 0.1, 3.0);
    DomainBall ball(10.0);
    RngStream rng(seed, "oracles-adv");
    results.push_back(lipschitz_probe(loss, ball, 1000, rng));
    results.push_back(weak_convexity_probe(loss, ball, 1000, rng));
    results.push_back(subgradient_inequality_probe(loss, ball, 1000, rng));
  }

  return results;
}

}  // namespace mea
