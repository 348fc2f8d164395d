#pragma once

#include "mea/loss.hpp"

#include <vector>

namespace mea {

// h(w; z) = ||w - z||_1. Convex, non-smooth; 1-Lipschitz in the l1/linf
// pairing, sqrt(d)-Lipschitz in l2. Exact prox, empirical minimizer
// (coordinatewise lower median) and closed-form N(0,I) population risk.
class L1Loss final : public LossModel {
 public:
  explicit L1Loss(Eigen::Index d);

  std::string name() const override { return "l1"; }
  Eigen::Index dim() const override { return d_; }

  double eval(const ParamVec& w, const Sample& z) const override;
  ParamVec subgrad(const ParamVec& w, const Sample& z) const override;

  double lipschitz() const override { return l2_lipschitz_; }
  std::optional<double> lipschitz_alt() const override { return 1.0; }

  bool has_exact_prox() const override { return true; }
  ParamVec exact_prox(const ParamVec& u, double p, const Dataset& s) const override;

  std::optional<ParamVec> empirical_minimizer(const Dataset& s) const override;
  std::optional<double> population_risk(const ParamVec& w) const override;

 private:
  Eigen::Index d_;
  double l2_lipschitz_;
};

// Adversarial linear/absolute loss with an linf attack ball of radius eps:
//   h(w; (x,y)) = max_{||delta||_inf <= eps} |<w, x + delta> - y|
//              = |<w,x> - y| + eps ||w||_1   (closed form).
// Data is bounded: ||x|| <= B. Convex, L = B + eps sqrt(d).
class AdvLinearAbsLoss final : public LossModel {
 public:
  AdvLinearAbsLoss(Eigen::Index d, double eps, double data_bound);

  std::string name() const override { return "adv_linear"; }
  Eigen::Index dim() const override { return d_; }

  double eval(const ParamVec& w, const Sample& z) const override;
  ParamVec subgrad(const ParamVec& w, const Sample& z) const override;

  double lipschitz() const override;
  std::optional<double> data_bound() const override { return data_bound_; }

  double attack_radius() const { return eps_; }

  Sample draw_sample(RngStream& rng) const override;

 private:
  Eigen::Index d_;
  double eps_;
  double data_bound_;
};

// One quadratic piece <a, w> + w'Bw/2 + c + <g, z>; the sample shifts the
// offset, so which piece achieves the max depends on z.
struct QuadPiece {
  Eigen::VectorXd a;
  Eigen::MatrixXd B;
  double c = 0.0;
  Eigen::VectorXd g;
};

// h(w; z) = max_i piece_i(w; z). Max of smooth pieces: non-smooth and
// l-weakly convex when every eigenvalue of every B_i is >= -l. Lipschitz on
// the domain ball with L = max_i(||a_i|| + ||B_i|| D_W/2). The achieving
// piece with the lowest index supplies the subgradient a_i + B_i w.
class MaxQuadLoss final : public LossModel {
 public:
  MaxQuadLoss(std::vector<QuadPiece> pieces, double weak_convexity, double domain_radius);

  std::string name() const override { return "max_quad"; }
  Eigen::Index dim() const override { return d_; }

  double eval(const ParamVec& w, const Sample& z) const override;
  ParamVec subgrad(const ParamVec& w, const Sample& z) const override;

  double lipschitz() const override { return lipschitz_; }
  double weak_convexity() const override { return l_; }

  // Exact prox exists for the 1-d shared-curvature family via a breakpoint
  // scan over the piecewise-quadratic objective.
  bool has_exact_prox() const override { return scan_prox_ok_; }
  ParamVec exact_prox(const ParamVec& u, double p, const Dataset& s) const override;

  const std::vector<QuadPiece>& pieces() const { return pieces_; }

 private:
  std::size_t achieving_piece(const ParamVec& w, const Sample& z) const;

  std::vector<QuadPiece> pieces_;
  double l_;
  double lipschitz_;
  Eigen::Index d_;
  bool scan_prox_ok_;
};

// Canonical 1-d weakly-convex instance used by the verification battery:
// three affine slopes over a shared -l curvature, offsets coupled to z.
MaxQuadLoss make_max_quad_1d(double weak_convexity, double domain_radius);

// Exact minimizer of (1/n) sum_i |t - v_i| + (rho/2)(t - u)^2 over t, by
// scanning the breakpoint intervals of the sorted values.
double prox_abs_sum_1d(std::vector<double> values, double u, double rho);

}  // namespace mea
