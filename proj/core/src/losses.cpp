#include "mea/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mea {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

}  // namespace

double prox_abs_sum_1d(std::vector<double> values, double u, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("prox_abs_sum_1d: rho must be positive");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  // Interval k = (v[k-1], v[k]) with +-inf sentinels; the l1-part derivative
  // there is (2k - n)/n. The full derivative is strictly increasing, so walk
  // intervals left to right: a stationary point left of the interval means
  // the minimizer is the breakpoint itself.
  for (std::size_t k = 0; k <= values.size(); ++k) {
    const double slope = (2.0 * static_cast<double>(k) - n) / n;
    const double t = u - slope / rho;
    const double lo = (k == 0) ? -kInf : values[k - 1];
    const double hi = (k == values.size()) ? kInf : values[k];
    if (t < lo) return lo;
    if (t <= hi) return t;
  }
  return values.back();  // unreachable for rho > 0
}

/*
 * L1Loss
 */

L1Loss::L1Loss(Eigen::Index d) : d_(d), l2_lipschitz_(std::sqrt(static_cast<double>(d))) {
  if (d < 1) throw std::invalid_argument("L1Loss: d >= 1 required");
}

double L1Loss::eval(const ParamVec& w, const Sample& z) const {
  return (w - z.x).lpNorm<1>();
}

ParamVec L1Loss::subgrad(const ParamVec& w, const Sample& z) const {
  ParamVec g(d_);
  for (Eigen::Index j = 0; j < d_; ++j) g[j] = sign(w[j] - z.x[j]);
  return g;
}

ParamVec L1Loss::exact_prox(const ParamVec& u, double p, const Dataset& s) const {
  if (!(p > 0.0)) throw std::invalid_argument("l1 exact_prox: p > 0 required");
  ParamVec out(d_);
  std::vector<double> column(s.size());
  for (Eigen::Index j = 0; j < d_; ++j) {
    for (std::size_t i = 0; i < s.size(); ++i) column[i] = s[i].x[j];
    out[j] = prox_abs_sum_1d(column, u[j], p);
  }
  return out;
}

std::optional<ParamVec> L1Loss::empirical_minimizer(const Dataset& s) const {
  ParamVec out(d_);
  std::vector<double> column(s.size());
  for (Eigen::Index j = 0; j < d_; ++j) {
    for (std::size_t i = 0; i < s.size(); ++i) column[i] = s[i].x[j];
    // Lower median: deterministic, optimal for even n as well.
    auto mid = column.begin() + static_cast<std::ptrdiff_t>((column.size() - 1) / 2);
    std::nth_element(column.begin(), mid, column.end());
    out[j] = *mid;
  }
  return out;
}

std::optional<double> L1Loss::population_risk(const ParamVec& w) const {
  // E|w_j - zeta| for zeta ~ N(0,1), summed over coordinates.
  double acc = 0.0;
  for (Eigen::Index j = 0; j < d_; ++j) {
    const double t = w[j];
    acc += t * (2.0 * normal_cdf(t) - 1.0) + 2.0 * normal_pdf(t);
  }
  return acc;
}

/*
 * AdvLinearAbsLoss
 */

AdvLinearAbsLoss::AdvLinearAbsLoss(Eigen::Index d, double eps, double data_bound)
    : d_(d), eps_(eps), data_bound_(data_bound) {
  if (d < 1) throw std::invalid_argument("AdvLinearAbsLoss: d >= 1 required");
  if (eps < 0.0) throw std::invalid_argument("AdvLinearAbsLoss: eps >= 0 required");
  if (!(data_bound > 0.0))
    throw std::invalid_argument("AdvLinearAbsLoss: data bound must be positive");
}

double AdvLinearAbsLoss::eval(const ParamVec& w, const Sample& z) const {
  return std::abs(w.dot(z.x) - z.y()) + eps_ * w.lpNorm<1>();
}

ParamVec AdvLinearAbsLoss::subgrad(const ParamVec& w, const Sample& z) const {
  const double s = sign(w.dot(z.x) - z.y());
  ParamVec g = s * z.x;
  for (Eigen::Index j = 0; j < d_; ++j) g[j] += eps_ * sign(w[j]);
  return g;
}

double AdvLinearAbsLoss::lipschitz() const {
  return data_bound_ + eps_ * std::sqrt(static_cast<double>(d_));
}

Sample AdvLinearAbsLoss::draw_sample(RngStream& rng) const {
  Eigen::VectorXd x = rng.normal_vector(d_);
  const double norm = x.norm();
  if (norm > data_bound_) x *= data_bound_ / norm;
  return Sample(std::move(x), rng.normal());
}

/*
 * MaxQuadLoss
 */

MaxQuadLoss::MaxQuadLoss(std::vector<QuadPiece> pieces, double weak_convexity,
                         double domain_radius)
    : pieces_(std::move(pieces)), l_(weak_convexity) {
  if (pieces_.empty()) throw std::invalid_argument("MaxQuadLoss: empty piece set");
  if (l_ < 0.0) throw std::invalid_argument("MaxQuadLoss: weak-convexity modulus >= 0 required");
  d_ = pieces_.front().a.size();
  double lip = 0.0;
  for (auto& piece : pieces_) {
    if (piece.a.size() != d_ || piece.B.rows() != d_ || piece.B.cols() != d_)
      throw std::invalid_argument("MaxQuadLoss: piece dimension mismatch");
    if (piece.g.size() == 0) piece.g = Eigen::VectorXd::Zero(d_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(piece.B);
    if (eig.eigenvalues().minCoeff() < -l_ - 1e-12)
      throw std::invalid_argument("MaxQuadLoss: piece curvature below -l");
    const double spectral =
        std::max(std::abs(eig.eigenvalues().minCoeff()), std::abs(eig.eigenvalues().maxCoeff()));
    lip = std::max(lip, piece.a.norm() + spectral * domain_radius);
  }
  lipschitz_ = lip;
  // The breakpoint-scan prox needs a single scalar curvature shared by all
  // pieces, so that piece crossings are affine in w.
  scan_prox_ok_ = d_ == 1;
  for (const auto& piece : pieces_) {
    if (piece.B(0, 0) != pieces_.front().B(0, 0)) scan_prox_ok_ = false;
  }
}

std::size_t MaxQuadLoss::achieving_piece(const ParamVec& w, const Sample& z) const {
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const QuadPiece& piece = pieces_[i];
    const double val =
        piece.a.dot(w) + 0.5 * w.dot(piece.B * w) + piece.c + piece.g.dot(z.x);
    if (val > best_val) {  // strict: lowest index wins ties
      best_val = val;
      best = i;
    }
  }
  return best;
}

double MaxQuadLoss::eval(const ParamVec& w, const Sample& z) const {
  const QuadPiece& piece = pieces_[achieving_piece(w, z)];
  return piece.a.dot(w) + 0.5 * w.dot(piece.B * w) + piece.c + piece.g.dot(z.x);
}

ParamVec MaxQuadLoss::subgrad(const ParamVec& w, const Sample& z) const {
  const QuadPiece& piece = pieces_[achieving_piece(w, z)];
  return piece.a + piece.B * w;
}

ParamVec MaxQuadLoss::exact_prox(const ParamVec& u, double p, const Dataset& s) const {
  if (!scan_prox_ok_) throw std::logic_error("max_quad: exact prox only for the 1-d shared-curvature family");
  if (!(p + pieces_.front().B(0, 0) > 0.0))
    throw std::invalid_argument("max_quad exact_prox: p > l required");
  const double curv = pieces_.front().B(0, 0);
  const std::size_t k = pieces_.size();
  const auto n = static_cast<double>(s.size());

  // Every pairwise crossing of the affine parts, per sample. Between two
  // consecutive crossings each sample's achieving piece is constant.
  std::vector<double> breaks;
  for (const Sample& z : s.samples()) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double da = pieces_[i].a[0] - pieces_[j].a[0];
        if (da == 0.0) continue;
        const double dc = (pieces_[j].c + pieces_[j].g[0] * z.x[0]) -
                          (pieces_[i].c + pieces_[i].g[0] * z.x[0]);
        breaks.push_back(dc / da);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());

  const auto mean_slope_at = [&](double probe) {
    double slope_sum = 0.0;
    ParamVec w(1);
    w[0] = probe;
    for (const Sample& z : s.samples()) slope_sum += pieces_[achieving_piece(w, z)].a[0];
    return slope_sum / n;
  };

  // Same walk as the l1 scan: the derivative of the objective is strictly
  // increasing, so a stationary point left of the interval pins the
  // minimizer at the breakpoint.
  const double denom = curv + p;
  ParamVec out(1);
  for (std::size_t ki = 0; ki <= breaks.size(); ++ki) {
    const double lo = (ki == 0) ? -kInf : breaks[ki - 1];
    const double hi = (ki == breaks.size()) ? kInf : breaks[ki];
    if (lo == hi) continue;
    double probe = 0.0;
    if (lo == -kInf && hi == kInf)
      probe = 0.0;
    else if (lo == -kInf)
      probe = hi - 1.0;
    else if (hi == kInf)
      probe = lo + 1.0;
    else
      probe = 0.5 * (lo + hi);
    const double t = (p * u[0] - mean_slope_at(probe)) / denom;
    if (t < lo) {
      out[0] = lo;
      return out;
    }
    if (t <= hi) {
      out[0] = t;
      return out;
    }
  }
  out[0] = breaks.back();  // unreachable: the last interval always accepts
  return out;
}

MaxQuadLoss make_max_quad_1d(double weak_convexity, double domain_radius) {
  const double curv = -weak_convexity;
  std::vector<QuadPiece> pieces(3);
  const double slopes[3] = {1.0, -1.0, 0.3};
  const double offsets[3] = {0.0, 0.1, 0.4};
  const double couplings[3] = {1.0, -1.0, 0.5};
  for (int i = 0; i < 3; ++i) {
    pieces[i].a = Eigen::VectorXd::Constant(1, slopes[i]);
    pieces[i].B = Eigen::MatrixXd::Constant(1, 1, curv);
    pieces[i].c = offsets[i];
    pieces[i].g = Eigen::VectorXd::Constant(1, couplings[i]);
  }
  return MaxQuadLoss(std::move(pieces), weak_convexity, domain_radius);
}

}  // namespace mea
