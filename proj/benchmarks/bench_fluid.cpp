#include <benchmark/benchmark.h>

#include "oarc/fluid.hpp"
#include "oarc/ski_rental.hpp"
#include "support/random_trees.hpp"

using namespace oarc;

namespace {

MarkovTree sized_tree(int states) {
  auto rng = RngStream::keyed(555, static_cast<std::uint64_t>(states));
  return testing::random_tree(rng, {.min_states = states, .max_states = states});
}

void BM_ValueFunctions(benchmark::State& state) {
  const auto tree = sized_tree(static_cast<int>(state.range(0)));
  double gamma = 0.0;
  for (auto _ : state) {
    gamma += 0.1;
    benchmark::DoNotOptimize(value_functions(tree, gamma));
  }
}

void BM_OptimalGamma(benchmark::State& state) {
  const auto tree = sized_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_gamma(tree, 0.8, 0.5));
}

void BM_WaterFill(benchmark::State& state) {
  const auto tree = sized_tree(static_cast<int>(state.range(0)));
  auto rng = RngStream::keyed(556, 0);
  const PriorityOrdering ordering{testing::random_ordering(rng, tree.size())};
  for (auto _ : state)
    benchmark::DoNotOptimize(water_fill(tree, 0.8, 0.5, ordering));
}

void BM_CStar(benchmark::State& state) {
  const auto tree = sized_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(c_star(tree, 0.8, 0.5));
}

}  // namespace

BENCHMARK(BM_ValueFunctions)->Arg(16)->Arg(128)->Arg(1024);
BENCHMARK(BM_OptimalGamma)->Arg(16)->Arg(128)->Arg(1024);
BENCHMARK(BM_WaterFill)->Arg(16)->Arg(128)->Arg(1024);
BENCHMARK(BM_CStar)->Arg(16)->Arg(128);

BENCHMARK_MAIN();
