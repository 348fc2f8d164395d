#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mea {

// Optimization variable (w or envelope center u). Euclidean norm throughout
// unless a loss documents otherwise.
using ParamVec = Eigen::VectorXd;

inline bool is_finite(const ParamVec& v) { return v.allFinite(); }

// One training point. Unsupervised losses read `x` as the sample z itself;
// supervised losses use the (x, label) pair.
struct Sample {
  Eigen::VectorXd x;
  std::optional<double> label;

  Sample() = default;
  explicit Sample(Eigen::VectorXd x_) : x(std::move(x_)) {}
  Sample(Eigen::VectorXd x_, double y) : x(std::move(x_)), label(y) {}

  double y() const {
    if (!label) throw std::logic_error("Sample: label requested but absent");
    return *label;
  }
};

// Ordered sample list S = {z_1,...,z_n}. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, std::uint64_t origin_seed = 0)
      : samples_(std::move(samples)), origin_seed_(origin_seed) {
    if (samples_.empty()) throw std::invalid_argument("Dataset: n >= 1 required");
  }

  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::uint64_t origin_seed() const { return origin_seed_; }

  Eigen::Index dim() const { return samples_.empty() ? 0 : samples_.front().x.size(); }

 private:
  std::vector<Sample> samples_;
  std::uint64_t origin_seed_ = 0;
};

// Replace sample i; the result differs from S in exactly that position.
Dataset make_neighbor(const Dataset& s, std::size_t i, Sample z_prime);

// Count of positions where the two datasets differ (exact comparison).
std::size_t hamming_distance(const Dataset& a, const Dataset& b);

// Centered Euclidean ball of radius D_W / 2.
struct DomainBall {
  double radius;

  explicit DomainBall(double r) : radius(r) {
    if (!(r > 0.0)) throw std::invalid_argument("DomainBall: radius must be positive");
  }

  double diameter() const { return 2.0 * radius; }
  bool contains(const ParamVec& w, double slack = 0.0) const {
    return w.norm() <= radius + slack;
  }
};

// Euclidean projection onto the ball. Identity on interior points, radial
// scaling outside; idempotent and non-expansive.
ParamVec project(const ParamVec& w, const DomainBall& ball);

}  // namespace mea
