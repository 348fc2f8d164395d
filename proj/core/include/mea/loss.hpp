#pragma once

#include "mea/rng.hpp"
#include "mea/types.hpp"

#include <memory>
#include <optional>
#include <string>

namespace mea {

// Contract for a non-smooth per-sample loss h(w; z).
//
// `lipschitz()` is the l2-certified constant used in every bound: the
// subgradient norm never exceeds it on the declared domain. Losses whose
// natural constant lives in a different norm pairing (the L1 loss is
// 1-Lipschitz in the l1/linf pairing) expose that value via
// `lipschitz_alt()`; reports carry both.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;

  virtual double eval(const ParamVec& w, const Sample& z) const = 0;
  virtual ParamVec subgrad(const ParamVec& w, const Sample& z) const = 0;

  virtual double lipschitz() const = 0;
  virtual std::optional<double> lipschitz_alt() const { return std::nullopt; }

  // Weak-convexity modulus l: h + l||.||^2/2 is convex. 0 for convex losses.
  virtual double weak_convexity() const { return 0.0; }

  virtual std::optional<double> data_bound() const { return std::nullopt; }

  virtual bool has_exact_prox() const { return false; }
  // argmin_w (1/n) sum_i h(w; z_i) + (p/2)||w - u||^2, exact.
  virtual ParamVec exact_prox(const ParamVec& u, double p, const Dataset& s) const;

  virtual std::optional<ParamVec> empirical_minimizer(const Dataset& s) const {
    (void)s;
    return std::nullopt;
  }

  // Closed-form R_D(w) under the standard-normal data distribution, when known.
  virtual std::optional<double> population_risk(const ParamVec& w) const {
    (void)w;
    return std::nullopt;
  }

  // One sample from the v1 data distribution (standard normal, shaped and
  // bounded as the loss requires).
  virtual Sample draw_sample(RngStream& rng) const { return Sample(rng.normal_vector(dim())); }

  double empirical_risk(const ParamVec& w, const Dataset& s) const;
  ParamVec empirical_subgrad(const ParamVec& w, const Dataset& s) const;
};

using LossPtr = std::shared_ptr<const LossModel>;

// Outcome of one sampled verification check.
struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst value observed
  double allowed = 0.0;   // bound the measurement must stay under
  int samples = 0;
  std::string detail;
};

// Empirical Lipschitz probe: |h(w1;z) - h(w2;z)| <= L ||w1 - w2|| + tol on
// random pairs drawn inside the domain ball.
CheckResult lipschitz_probe(const LossModel& loss, const DomainBall& ball, int probes,
                            RngStream& rng, double tol = 1e-9);

// Empirical weak-convexity probe: midpoint convexity of h + l||.||^2/2 along
// random segments inside the domain ball.
CheckResult weak_convexity_probe(const LossModel& loss, const DomainBall& ball, int probes,
                                 RngStream& rng, double tol = 1e-9);

// Subgradient inequality h(v;z) >= h(w;z) + <g, v-w> - (l/2)||v-w||^2.
CheckResult subgradient_inequality_probe(const LossModel& loss, const DomainBall& ball,
                                         int probes, RngStream& rng, double tol = 1e-9);

}  // namespace mea
