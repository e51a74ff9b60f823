#include <benchmark/benchmark.h>

#include "oarc/content_mod.hpp"

using namespace oarc;

namespace {

const TrajectoryDataset& small_ugc() {
  static const TrajectoryDataset ds = gen_ugc({.count = 400, .horizon = 60}, 99);
  return ds;
}

void BM_TrainRegressor(benchmark::State& state) {
  const auto& ds = small_ugc();
  ForestConfig config;
  config.trees = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(train_regressor(ds, 500.0, RegressorBackend::Forest, config));
}

void BM_Predict(benchmark::State& state) {
  const auto& ds = small_ugc();
  const auto reg = train_regressor(ds, 500.0);
  const auto s = content_state(ds.records[7], 20);
  const auto f = s.features();
  for (auto _ : state) benchmark::DoNotOptimize(reg.predict(f));
}

void BM_GenUgc(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        gen_ugc({.count = static_cast<int>(state.range(0)), .horizon = 50}, 3));
}

}  // namespace

BENCHMARK(BM_TrainRegressor)->Arg(10)->Arg(50);
BENCHMARK(BM_Predict);
BENCHMARK(BM_GenUgc)->Arg(100)->Arg(400);
