#include <benchmark/benchmark.h>

#include "demoedit/robot.hpp"
#include "demoedit/synthetic.hpp"

using namespace demoedit;

static void BM_ForwardKinematics(benchmark::State& state) {
  const KinematicChain chain = synthetic::default_chain();
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(chain, chain.home));
}
BENCHMARK(BM_ForwardKinematics);

static void BM_Jacobian(benchmark::State& state) {
  const KinematicChain chain = synthetic::default_chain();
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(chain, chain.home));
}
BENCHMARK(BM_Jacobian);

static void BM_InverseKinematicsWarmStart(benchmark::State& state) {
  const KinematicChain chain = synthetic::default_chain();
  JointConfig q = chain.home;
  q[1] += 0.05;
  q[3] -= 0.04;
  q[5] += 0.06;
  const RigidTransform target = forward_kinematics(chain, q).ee_pose;
  for (auto _ : state) benchmark::DoNotOptimize(inverse_kinematics(chain, target, chain.home, IkParams{}));
}
BENCHMARK(BM_InverseKinematicsWarmStart)->Unit(benchmark::kMicrosecond);
