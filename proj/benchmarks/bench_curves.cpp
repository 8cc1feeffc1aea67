// Microbenchmarks for the hot paths: curve construction, composition,
// discretization, metrics, and mechanism sampling.
#include <benchmark/benchmark.h>

#include "tradeoff/compose.hpp"
#include "tradeoff/divisible.hpp"
#include "tradeoff/mechanism.hpp"
#include "tradeoff/neyman.hpp"

namespace {

using namespace tradeoff;

void BM_PoissonCurve(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(curve(poisson_pair(1.0, 3.0)));
  }
}
BENCHMARK(BM_PoissonCurve);

void BM_SelfCompose(benchmark::State& state) {
  const auto n = state.range(0);
  const ExperimentPair step(bernoulli_pair(1.0 / double(n), 3.0 / double(n)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(self_compose(step, n));
  }
}
BENCHMARK(BM_SelfCompose)->Arg(50)->Arg(200);

void BM_GaussianAtoms(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian_llr_atoms(1.0));
  }
}
BENCHMARK(BM_GaussianAtoms);

void BM_SupDistance(benchmark::State& state) {
  const TradeoffCurve f = curve(poisson_pair(1.0, 3.0));
  const TradeoffCurve g = TradeoffCurve::gaussian(1.0).discretized(1e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.sup_distance(g));
  }
}
BENCHMARK(BM_SupDistance);

void BM_LevyDistance(benchmark::State& state) {
  const TradeoffCurve f = curve(poisson_pair(1.0, 3.0));
  const TradeoffCurve g = TradeoffCurve::gaussian(1.0).discretized(1e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.levy_distance(g));
  }
}
BENCHMARK(BM_LevyDistance);

void BM_MixtureCurve(benchmark::State& state) {
  MixtureSpec spec;
  spec.components = {{0.5, 0.5}, {0.5, 2.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixture_curve(spec));
  }
}
BENCHMARK(BM_MixtureCurve);

void BM_MechanismRelease(benchmark::State& state) {
  const PoissonMechanismParams p =
      calibrate(1.0, 3.0, StatRange{0.0, 1.0, 1.0});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(release(p, 0.5, seed++));
  }
}
BENCHMARK(BM_MechanismRelease);

}  // namespace

BENCHMARK_MAIN();
