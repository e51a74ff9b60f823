#include <benchmark/benchmark.h>

#include "oarc/simulator.hpp"
#include "support/fixtures.hpp"

using namespace oarc;

namespace {

void BM_SimulatePeriods(benchmark::State& state) {
  const auto tree = testing::six_state_tree();
  SimConfig config;
  config.n = static_cast<int>(state.range(0));
  config.lambda = 0.8;
  config.mu = 0.7;
  config.horizon = 500;
  config.warmup = 0;
  config.replications = 1;
  config.threads = 1;
  const auto policy = builtin(PolicyKind::ExpectedRemainingCost, tree);
  for (auto _ : state) {
    config.seed += 1;
    benchmark::DoNotOptimize(run(tree, config, policy));
  }
  state.SetItemsProcessed(state.iterations() * config.horizon);
}

void BM_RngBinomial(benchmark::State& state) {
  auto rng = RngStream::keyed(1, 2);
  const auto n = state.range(0);
  std::int64_t acc = 0;
  for (auto _ : state) acc += rng.binomial(n, 0.37);
  benchmark::DoNotOptimize(acc);
}

}  // namespace

BENCHMARK(BM_SimulatePeriods)->Arg(100)->Arg(1000)->Arg(10000);
BENCHMARK(BM_RngBinomial)->Arg(30)->Arg(1000)->Arg(100000);
