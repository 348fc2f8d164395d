#include "mea/loss.hpp"

#include <cmath>

namespace mea {

ParamVec LossModel::exact_prox(const ParamVec& u, double p, const Dataset& s) const {
  (void)u;
  (void)p;
  (void)s;
  throw std::logic_error(name() + ": no exact prox available");
}

double LossModel::empirical_risk(const ParamVec& w, const Dataset& s) const {
  double acc = 0.0;
  for (const Sample& z : s.samples()) acc += eval(w, z);
  return acc / static_cast<double>(s.size());
}

ParamVec LossModel::empirical_subgrad(const ParamVec& w, const Dataset& s) const {
  ParamVec g = ParamVec::Zero(w.size());
  for (const Sample& z : s.samples()) g += subgrad(w, z);
  return g / static_cast<double>(s.size());
}

namespace {

ParamVec random_in_ball(const DomainBall& ball, Eigen::Index d, RngStream& rng) {
  // Gaussian direction, radius scaled by u^(1/d): uniform in the ball.
  ParamVec v = rng.normal_vector(d);
  const double norm = v.norm();
  if (norm == 0.0) return ParamVec::Zero(d);
  const double r = ball.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return v * (r / norm);
}

}  // namespace

CheckResult lipschitz_probe(const LossModel& loss, const DomainBall& ball, int probes,
                            RngStream& rng, double tol) {
  CheckResult res;
  res.name = loss.name() + ".lipschitz_probe";
  res.samples = probes;
  res.allowed = tol;
  double worst = -1e300;
  for (int i = 0; i < probes; ++i) {
    const ParamVec w1 = random_in_ball(ball, loss.dim(), rng);
    const ParamVec w2 = random_in_ball(ball, loss.dim(), rng);
    const Sample z = loss.draw_sample(rng);
    const double lhs = std::abs(loss.eval(w1, z) - loss.eval(w2, z));
    const double rhs = loss.lipschitz() * (w1 - w2).norm();
    worst = std::max(worst, lhs - rhs);
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult weak_convexity_probe(const LossModel& loss, const DomainBall& ball, int probes,
                                 RngStream& rng, double tol) {
  CheckResult res;
  res.name = loss.name() + ".weak_convexity_probe";
  res.samples = probes;
  res.allowed = tol;
  const double l = loss.weak_convexity();
  double worst = -1e300;
  for (int i = 0; i < probes; ++i) {
    const ParamVec a = random_in_ball(ball, loss.dim(), rng);
    const ParamVec b = random_in_ball(ball, loss.dim(), rng);
    const ParamVec m = 0.5 * (a + b);
    const Sample z = loss.draw_sample(rng);
    const auto reg = [&](const ParamVec& w) {
      return loss.eval(w, z) + 0.5 * l * w.squaredNorm();
    };
    const double gap = reg(m) - 0.5 * (reg(a) + reg(b));
    worst = std::max(worst, gap);
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

CheckResult subgradient_inequality_probe(const LossModel& loss, const DomainBall& ball,
                                         int probes, RngStream& rng, double tol) {
  CheckResult res;
  res.name = loss.name() + ".subgradient_inequality";
  res.samples = probes;
  res.allowed = tol;
  const double l = loss.weak_convexity();
  double worst = -1e300;
  for (int i = 0; i < probes; ++i) {
    const ParamVec w = random_in_ball(ball, loss.dim(), rng);
    const ParamVec v = random_in_ball(ball, loss.dim(), rng);
    const Sample z = loss.draw_sample(rng);
    const ParamVec g = loss.subgrad(w, z);
    const double lhs = loss.eval(w, z) + g.dot(v - w) - 0.5 * l * (v - w).squaredNorm();
    worst = std::max(worst, lhs - loss.eval(v, z));
  }
  res.measured = worst;
  res.pass = worst <= tol;
  return res;
}

}  // namespace mea
