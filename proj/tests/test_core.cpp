#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mea/rng.hpp"
#include "mea/types.hpp"

#include <cmath>

using namespace mea;

namespace {

ParamVec vec2(double a, double b) {
  ParamVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("project: interior, scaling and boundary cases") {
  const DomainBall unit(1.0);
  CHECK(project(vec2(0, 0), unit) == vec2(0, 0));

  const ParamVec scaled = project(vec2(3, 4), unit);
  CHECK(scaled[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(scaled[1] == doctest::Approx(0.8).epsilon(1e-15));

  CHECK(project(vec2(2, 0), DomainBall(2.0)) == vec2(2, 0));
}

TEST_CASE("project: rejects non-finite input and bad radii") {
  const DomainBall unit(1.0);
  CHECK_THROWS_AS(project(vec2(std::nan(""), 0), unit), std::invalid_argument);
  CHECK_THROWS_AS(project(vec2(INFINITY, 0), unit), std::invalid_argument);
  CHECK_THROWS_AS(DomainBall(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DomainBall(-1.0), std::invalid_argument);
}

TEST_CASE("project: idempotent and non-expansive on random pairs") {
  const DomainBall ball(2.5);
  RngStream rng(11, "project-test");
  for (int i = 0; i < 500; ++i) {
    const ParamVec a = 5.0 * rng.normal_vector(6);
    const ParamVec b = 5.0 * rng.normal_vector(6);
    const ParamVec pa = project(a, ball);
    const ParamVec pb = project(b, ball);
    CHECK((project(pa, ball) - pa).norm() <= 1e-12);
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
    CHECK(pa.norm() <= ball.radius + 1e-12);
  }
}

TEST_CASE("make_neighbor replaces exactly one position") {
  std::vector<Sample> samples;
  for (int i = 0; i < 3; ++i) samples.emplace_back(ParamVec::Constant(2, i));
  const Dataset s(samples);
  const Dataset t = make_neighbor(s, 1, Sample(ParamVec::Constant(2, 9.0)));
  CHECK(t[0].x == s[0].x);
  CHECK(t[1].x == ParamVec::Constant(2, 9.0));
  CHECK(t[2].x == s[2].x);
  CHECK(hamming_distance(s, t) == 1);

  CHECK_THROWS_AS(make_neighbor(s, 3, Sample(ParamVec::Zero(2))), std::out_of_range);
}

TEST_CASE("make_neighbor: replacing a sample with itself gives S' = S") {
  const Dataset s({Sample(vec2(1, 2))});
  const Dataset t = make_neighbor(s, 0, s[0]);
  CHECK(hamming_distance(s, t) == 0);
}

TEST_CASE("make_neighbor: fresh draw at the last index has Hamming distance one") {
  const Dataset s = sample_gaussian_dataset(3, 10, 5);
  RngStream rng(5, "fresh");
  const Dataset t = make_neighbor(s, 9, Sample(rng.normal_vector(3)));
  CHECK(hamming_distance(s, t) == 1);
}

TEST_CASE("sample_gaussian_dataset is bit-reproducible") {
  const Dataset a = sample_gaussian_dataset(10, 100, 7);
  const Dataset b = sample_gaussian_dataset(10, 100, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);
  const Dataset c = sample_gaussian_dataset(10, 100, 8);
  CHECK(hamming_distance(a, c) > 0);
}

TEST_CASE("sample_gaussian_dataset: per-coordinate mean within the CLT bound") {
  const std::size_t n = 100000;
  const Dataset s = sample_gaussian_dataset(10, n, 21);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(10);
  for (std::size_t i = 0; i < n; ++i) mean += s[i].x;
  mean /= static_cast<double>(n);
  for (Eigen::Index j = 0; j < 10; ++j)
    CHECK(std::abs(mean[j]) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sample_gaussian_dataset: unit variance at n = 10^6") {
  const std::size_t n = 1000000;
  const Dataset s = sample_gaussian_dataset(1, n, 33);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += s[i].x[0];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = s[i].x[0] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  CHECK(var >= 0.99);
  CHECK(var <= 1.01);
}

TEST_CASE("sample_gaussian_dataset rejects empty shapes") {
  CHECK_THROWS_AS(sample_gaussian_dataset(0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_gaussian_dataset(3, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Dataset(std::vector<Sample>{}), std::invalid_argument);
}

TEST_CASE("RngStream: identical triples give identical sequences, roles differ") {
  RngStream a(42, "idx", 3);
  RngStream b(42, "idx", 3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform_index(17) == b.uniform_index(17));
  }
  RngStream c(42, "idx", 3);
  RngStream d(42, "data", 3);
  RngStream e(42, "idx", 4);
  int differs_role = 0;
  int differs_index = 0;
  for (int i = 0; i < 64; ++i) {
    const auto x = c.uniform_index(1000);
    if (x != d.uniform_index(1000)) ++differs_role;
    if (x != e.uniform_index(1000)) ++differs_index;
  }
  CHECK(differs_role > 0);
  CHECK(differs_index > 0);
}

TEST_CASE("Sample label accessor") {
  const Sample labeled(vec2(1, 2), 0.5);
  CHECK(labeled.y() == 0.5);
  const Sample plain(vec2(1, 2));
  CHECK_THROWS_AS(plain.y(), std::logic_error);
}
