#include <benchmark/benchmark.h>

#include "clouds.hpp"
#include "demoedit/spatial_index.hpp"

using namespace demoedit;

static void BM_SpatialIndexBuild(benchmark::State& state) {
  const auto pts = bench::uniform_cloud(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(SpatialIndex(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpatialIndexBuild)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_SpatialIndexQuery(benchmark::State& state) {
  const auto pts = bench::uniform_cloud(static_cast<int>(state.range(0)), 2);
  const auto queries = bench::uniform_cloud(1024, 3);
  const SpatialIndex idx(pts);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx.nearest(queries[i++ & 1023]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SpatialIndexQuery)->Arg(1000)->Arg(10000)->Arg(100000);
