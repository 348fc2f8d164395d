#pragma once

#include "mea/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace mea {

// Deterministic named RNG stream. Streams are derived from (master seed,
// role, index), so two runs that construct the same triple consume identical
// sequences -- coupled stability runs share randomness by construction.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view role, std::uint64_t index = 0);

  std::mt19937_64& engine() { return engine_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  // Uniform draw from {0, ..., n-1}.
  std::size_t uniform_index(std::size_t n);

  Eigen::VectorXd normal_vector(Eigen::Index d);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// n i.i.d. standard-normal samples of dimension d. Bit-reproducible for a
// fixed (seed, role, index) triple.
Dataset sample_gaussian_dataset(Eigen::Index d, std::size_t n, std::uint64_t seed,
                                std::string_view role = "data", std::uint64_t index = 0);

}  // namespace mea
