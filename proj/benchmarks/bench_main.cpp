#include <benchmark/benchmark.h>

#include "mea/drivers.hpp"
#include "mea/losses.hpp"

using namespace mea;

namespace {

void BM_L1ExactProx(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  L1Loss loss(10);
  const Dataset s = sample_gaussian_dataset(10, n, 1);
  const ParamVec u = ParamVec::Constant(10, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss.exact_prox(u, 1.0, s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_L1ExactProx)->Arg(100)->Arg(1000)->Arg(10000);

void BM_InnerSgdSteps(benchmark::State& state) {
  L1Loss loss(10);
  const Dataset s = sample_gaussian_dataset(10, 1000, 2);
  InnerProblem problem(loss, s, ParamVec::Zero(10), 1.0, DomainBall(10.0));
  InnerConfig cfg;
  cfg.steps = state.range(0);
  for (auto _ : state) {
    RngStream idx(3, "bench-idx");
    benchmark::DoNotOptimize(inner_sgd(problem, cfg, ParamVec::Zero(10), idx));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InnerSgdSteps)->Arg(1000)->Arg(10000);

void BM_MeAEpoch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  L1Loss loss(10);
  const Dataset s = sample_gaussian_dataset(10, n, 4);
  OuterSchedule sched;
  sched.kind = OuterSchedule::Kind::inverse_t;
  sched.c = 1.0;
  InnerConfig inner;
  inner.steps = static_cast<std::int64_t>(n);
  for (auto _ : state) {
    RngStream idx(5, "bench-idx");
    benchmark::DoNotOptimize(run_me_a(loss, s, 1.0, sched, InnerKind::sgd, inner, 1,
                                      ParamVec::Zero(10), ParamVec::Zero(10), DomainBall(10.0),
                                      idx));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MeAEpoch)->Arg(1000)->Arg(10000);

void BM_GaussianDataset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_dataset(10, n, 6));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_GaussianDataset)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
