#include "mea/types.hpp"

namespace mea {

Dataset make_neighbor(const Dataset& s, std::size_t i, Sample z_prime) {
  if (i >= s.size()) throw std::out_of_range("make_neighbor: index out of range");
  std::vector<Sample> samples = s.samples();
  samples[i] = std::move(z_prime);
  return Dataset(std::move(samples), s.origin_seed());
}

std::size_t hamming_distance(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("hamming_distance: datasets differ in size");
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Sample& sa = a[i];
    const Sample& sb = b[i];
    const bool same = sa.x.size() == sb.x.size() && sa.x == sb.x && sa.label == sb.label;
    if (!same) ++count;
  }
  return count;
}

ParamVec project(const ParamVec& w, const DomainBall& ball) {
  if (!is_finite(w)) throw std::invalid_argument("project: non-finite input");
  const double norm = w.norm();
  if (norm <= ball.radius) return w;
  return w * (ball.radius / norm);
}

}  // namespace mea
