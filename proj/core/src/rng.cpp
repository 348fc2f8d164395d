#include "mea/rng.hpp"

namespace mea {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view role, std::uint64_t index) {
  std::uint64_t state = splitmix64(master_seed ^ fnv1a(role));
  state = splitmix64(state ^ (index * 0x9e3779b97f4a7c15ULL + 1));
  engine_.seed(state);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Eigen::VectorXd RngStream::normal_vector(Eigen::Index d) {
  Eigen::VectorXd v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = normal();
  return v;
}

Dataset sample_gaussian_dataset(Eigen::Index d, std::size_t n, std::uint64_t seed,
                                std::string_view role, std::uint64_t index) {
  if (d < 1) throw std::invalid_argument("sample_gaussian_dataset: d >= 1 required");
  if (n < 1) throw std::invalid_argument("sample_gaussian_dataset: n >= 1 required");
  RngStream stream(seed, role, index);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) samples.emplace_back(stream.normal_vector(d));
  return Dataset(std::move(samples), seed);
}

}  // namespace mea
