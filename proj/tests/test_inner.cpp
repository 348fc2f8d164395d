#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mea/inner.hpp"
#include "mea/losses.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace mea;

namespace {

ParamVec vec1(double a) { return ParamVec::Constant(1, a); }

Dataset dataset_1d(std::initializer_list<double> values) {
  std::vector<Sample> samples;
  for (double v : values) samples.emplace_back(vec1(v));
  return Dataset(std::move(samples));
}

}  // namespace

TEST_CASE("inner_sgd converges to the exact prox on the 1-d toy") {
  L1Loss loss(1);
  const Dataset s = dataset_1d({0.0});
  InnerProblem problem(loss, s, vec1(2.0), 1.0, DomainBall(10.0));
  InnerConfig cfg;
  cfg.steps = 10000;
  cfg.c0 = 1.0;
  RngStream idx(1, "idx");
  const InnerResult res = inner_sgd(problem, cfg, vec1(0.0), idx);
  CHECK(std::abs(res.w_out[0] - 1.0) <= 0.05);
  CHECK(res.steps_used == 10000);
}

TEST_CASE("inner_sgd: zero initial step means no movement") {
  L1Loss loss(2);
  const Dataset s = sample_gaussian_dataset(2, 5, 3);
  InnerProblem problem(loss, s, ParamVec::Zero(2), 1.0, DomainBall(10.0));
  InnerConfig cfg;
  cfg.steps = 1;
  cfg.c0 = 0.0;
  RngStream idx(1, "idx");
  const ParamVec w0 = ParamVec::Constant(2, 0.5);
  CHECK(inner_sgd(problem, cfg, w0, idx).w_out == w0);
}

TEST_CASE("inner_sgd certificate arithmetic: C1/sqrt(N)") {
  // L = 1, p = 0.5, D_W = 4, l = 0: C1 = (1 + 2)/0.5 = 6, so 6/100 = 0.06.
  CHECK(inner_sgd_constant(1.0, 0.5, 4.0, 0.0) == doctest::Approx(6.0));
  L1Loss loss(1);
  const Dataset s = dataset_1d({0.0});
  InnerProblem problem(loss, s, vec1(0.0), 0.5, DomainBall(2.0));
  InnerConfig cfg;
  cfg.steps = 10000;
  RngStream idx(2, "idx");
  CHECK(inner_sgd(problem, cfg, vec1(0.0), idx).certified_eps == doctest::Approx(0.06));
}

TEST_CASE("inner_sgd rejects p <= l") {
  MaxQuadLoss loss = make_max_quad_1d(0.5, 10.0);
  const Dataset s = dataset_1d({0.0});
  InnerProblem problem(loss, s, vec1(0.0), 0.5, DomainBall(10.0));
  InnerConfig cfg;
  RngStream idx(3, "idx");
  CHECK_THROWS_WITH_AS(static_cast<void>(inner_sgd(problem, cfg, vec1(0.0), idx)),
                       doctest::Contains("not strongly convex"), std::invalid_argument);
}

TEST_CASE("inner_subgrad_fixed: 1-d convergence and the zero-step case") {
  L1Loss loss(1);
  const Dataset s = dataset_1d({0.0});
  InnerProblem problem(loss, s, vec1(2.0), 1.0, DomainBall(10.0));
  const InnerResult res = inner_subgrad_fixed(problem, 0.01, 2000, vec1(0.0));
  CHECK(std::abs(res.w_out[0] - 1.0) <= 0.15);

  const InnerResult frozen = inner_subgrad_fixed(problem, 0.0, 50, vec1(0.3));
  CHECK(frozen.w_out == vec1(0.3));
}

TEST_CASE("inner_subgrad_fixed rejects steps beyond 1/p") {
  L1Loss loss(1);
  const Dataset s = dataset_1d({0.0});
  InnerProblem problem(loss, s, vec1(0.0), 2.0, DomainBall(10.0));
  CHECK_THROWS_WITH_AS(static_cast<void>(inner_subgrad_fixed(problem, 0.6, 10, vec1(0.0))),
                       doctest::Contains("contraction lost"), std::invalid_argument);
}

TEST_CASE("inner_subgrad_fixed: per-step contraction audit against the exact prox") {
  L1Loss loss(1);
  const Dataset s = dataset_1d({0.0});
  const double p = 1.0;
  const double c = 0.01;
  InnerProblem problem(loss, s, vec1(2.0), p, DomainBall(10.0));
  const double w_star = loss.exact_prox(vec1(2.0), p, s)[0];
  REQUIRE(w_star == doctest::Approx(1.0));

  std::vector<ParamVec> trace;
  inner_subgrad_fixed(problem, c, 2000, vec1(0.0), &trace);
  const double lip = loss.lipschitz();
  for (std::size_t t = 0; t + 1 < trace.size(); ++t) {
    const double d_now = (trace[t][0] - w_star) * (trace[t][0] - w_star);
    const double d_next = (trace[t + 1][0] - w_star) * (trace[t + 1][0] - w_star);
    CHECK(d_next <= (1.0 - c * p) * d_now + c * c * lip * lip + 1e-15);
  }
}

TEST_CASE("inner_exact delegates to the loss prox and satisfies first-order optimality") {
  L1Loss loss(2);
  const Dataset s = sample_gaussian_dataset(2, 7, 9);
  InnerProblem problem(loss, s, ParamVec::Constant(2, 0.8), 1.3, DomainBall(10.0));
  const InnerResult res = inner_exact(problem);
  CHECK(res.w_out == loss.exact_prox(ParamVec::Constant(2, 0.8), 1.3, s));
  CHECK(res.certified_eps == 1e-12);

  for (Eigen::Index j = 0; j < 2; ++j) {
    std::vector<double> column;
    for (std::size_t i = 0; i < s.size(); ++i) column.push_back(s[i].x[j]);
    CHECK(mea::testing::l1_prox_subdiff_ok(res.w_out[j], column, 0.8, 1.3, 1e-9));
  }
}

TEST_CASE("inner_exact: huge p pins the prox to the center") {
  L1Loss loss(3);
  const Dataset s = sample_gaussian_dataset(3, 11, 15);
  const ParamVec u = ParamVec::Constant(3, 0.4);
  InnerProblem problem(loss, s, u, 1e8, DomainBall(10.0));
  CHECK((inner_exact(problem).w_out - u).norm() <= 1e-6);
}

TEST_CASE("inner_exact requires a prox oracle") {
  AdvLinearAbsLoss loss(2, 0.1, 3.0);
  std::vector<Sample> samples{Sample(ParamVec::Zero(2), 0.0)};
  const Dataset s(samples);
  InnerProblem problem(loss, s, ParamVec::Zero(2), 1.0, DomainBall(10.0));
  CHECK_THROWS_AS(static_cast<void>(inner_exact(problem)), std::logic_error);
}

TEST_CASE("inner stability certificate: 100 random neighbor pairs stay under 2L/(n(p-l))") {
  L1Loss loss(10);
  const double p = 0.5;
  const std::size_t n = 10;
  const double bound = 2.0 * loss.lipschitz() / (static_cast<double>(n) * p);
  RngStream rng(77, "inner-stab");
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset s = sample_gaussian_dataset(10, n, 1000 + trial);
    const Dataset s_prime = make_neighbor(s, rng.uniform_index(n), Sample(rng.normal_vector(10)));
    const ParamVec u = 2.0 * rng.normal_vector(10);
    const ParamVec wa = loss.exact_prox(u, p, s);
    const ParamVec wb = loss.exact_prox(u, p, s_prime);
    CHECK((wa - wb).norm() <= bound + 1e-9);
  }
}

TEST_CASE("inner_sgd: median error non-increasing in N and certificate coverage") {
  L1Loss loss(10);
  const DomainBall ball(10.0);
  const double p = 1.0;
  const Dataset s = sample_gaussian_dataset(10, 100, 4242);
  const ParamVec u = ParamVec::Constant(10, 0.5);
  InnerProblem problem(loss, s, u, p, ball);
  const ParamVec w_star = loss.exact_prox(u, p, s);

  const std::int64_t budgets[3] = {100, 1000, 10000};
  double medians[3];
  int covered_at_largest = 0;
  for (int bi = 0; bi < 3; ++bi) {
    std::vector<double> errors;
    for (int seed = 0; seed < 32; ++seed) {
      InnerConfig cfg;
      cfg.steps = budgets[bi];
      RngStream idx(seed, "inner-rate");
      const InnerResult res = inner_sgd(problem, cfg, ParamVec::Zero(10), idx);
      const double err = (res.w_out - w_star).norm();
      errors.push_back(err);
      if (bi == 2 && err <= res.certified_eps) ++covered_at_largest;
    }
    std::nth_element(errors.begin(), errors.begin() + 16, errors.end());
    medians[bi] = errors[16];
  }
  CHECK(medians[0] >= medians[1]);
  CHECK(medians[1] >= medians[2]);
  CHECK(covered_at_largest >= 31);  // >= 95% of 32
}

TEST_CASE("inner_to_tolerance: exact prox path and the unreachable-tolerance error") {
  L1Loss l1(2);
  const Dataset s = sample_gaussian_dataset(2, 5, 8);
  InnerProblem exact_problem(l1, s, ParamVec::Zero(2), 1.0, DomainBall(10.0));
  CHECK(inner_to_tolerance(exact_problem, 1e-10).certified_eps <= 1e-10);

  AdvLinearAbsLoss adv(2, 0.1, 3.0);
  std::vector<Sample> samples{Sample(ParamVec::Constant(2, 0.5), 1.0)};
  const Dataset tiny(samples);
  InnerProblem hard(adv, tiny, ParamVec::Zero(2), 1.0, DomainBall(10.0));
  CHECK_THROWS_WITH_AS(static_cast<void>(inner_to_tolerance(hard, 1e-8, 100000)),
                       doctest::Contains("achievable"), std::runtime_error);
  // A loose tolerance is reachable iteratively.
  const InnerResult res = inner_to_tolerance(hard, 0.05);
  CHECK(res.certified_eps <= 0.05);
}
