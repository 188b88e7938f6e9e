#include <benchmark/benchmark.h>

#include "clouds.hpp"
#include "demoedit/registration.hpp"

using namespace demoedit;

static void BM_Icp(benchmark::State& state) {
  const auto src = bench::blob(static_cast<int>(state.range(0)));
  const RigidTransform G(axis_angle(Vec3(0.2, -0.4, 1).normalized(), 0.15), Vec3(0.01, -0.008, 0.012));
  std::vector<Vec3> dst;
  for (const auto& p : src) dst.push_back(G * p);
  IcpParams params;
  params.trim_distance = 0.05;
  params.max_iterations = 100;
  for (auto _ : state) benchmark::DoNotOptimize(icp(src, dst, RigidTransform::identity(), params));
}
BENCHMARK(BM_Icp)->Arg(778)->Arg(3000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Umeyama(benchmark::State& state) {
  const auto src = bench::uniform_cloud(static_cast<int>(state.range(0)), 4);
  const RigidTransform G(axis_angle(Vec3::UnitZ(), 0.3), Vec3(0.1, 0.2, 0.3));
  std::vector<Vec3> dst;
  for (const auto& p : src) dst.push_back(G * p);
  for (auto _ : state) benchmark::DoNotOptimize(umeyama_align(src, dst));
}
BENCHMARK(BM_Umeyama)->Arg(778)->Arg(10000);
