#include <benchmark/benchmark.h>

#include "demoedit/compositor.hpp"
#include "demoedit/synthetic.hpp"

using namespace demoedit;

namespace {

Extrinsics side_view() {
  const Vec3 eye(1.2, -0.9, 0.9);
  const Vec3 z = (Vec3(0.3, 0.0, 0.35) - eye).normalized();
  const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
  RotationMatrix R;
  R << x, z.cross(x), z;
  return Extrinsics{RigidTransform(R, eye)};
}

Mask disk_mask(int w, int h, int radius) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int dx = x - w / 2, dy = y - h / 2;
      if (dx * dx + dy * dy <= radius * radius) m.at(x, y) = 255;
    }
  }
  return m;
}

RgbImage gradient(int w, int h) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(x * 255 / w);
      img.at(x, y, 1) = static_cast<std::uint8_t>(y * 255 / h);
      img.at(x, y, 2) = static_cast<std::uint8_t>((x ^ y) & 255);
    }
  }
  return img;
}

}  // namespace

static void BM_RenderRobot(benchmark::State& state) {
  const KinematicChain chain = synthetic::default_chain();
  const Intrinsics k{600.0, 600.0, 319.5, 239.5, 640, 480};
  const Extrinsics e = side_view();
  for (auto _ : state) benchmark::DoNotOptimize(render_robot(chain, chain.home, 0.5, k, e));
}
BENCHMARK(BM_RenderRobot)->Unit(benchmark::kMillisecond);

static void BM_InpaintFmm(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const RgbImage img = gradient(640, 480);
  const Mask mask = disk_mask(640, 480, r);
  for (auto _ : state) benchmark::DoNotOptimize(inpaint_fmm(img, mask, 3));
}
BENCHMARK(BM_InpaintFmm)->Arg(20)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_DilateMask(benchmark::State& state) {
  const Mask mask = disk_mask(640, 480, 80);
  for (auto _ : state) benchmark::DoNotOptimize(dilate_mask(mask, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DilateMask)->Arg(3)->Arg(15)->Unit(benchmark::kMillisecond);
