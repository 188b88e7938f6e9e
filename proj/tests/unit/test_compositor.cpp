#include <filesystem>

#include <gtest/gtest.h>

#include "demoedit/compositor.hpp"
#include "demoedit/error.hpp"
#include "demoedit/synthetic.hpp"
#include "dilate_oracle.hpp"
#include "golden_scene.hpp"
#include "inpaint_oracle.hpp"
#include "random.hpp"
#include "scanline_oracle.hpp"

using namespace demoedit;

namespace {

const Intrinsics kSmall{50.0, 50.0, 15.5, 11.5, 32, 24};

TriangleMesh triangle(double z, Color color, double size = 0.2) {
  TriangleMesh m;
  m.vertices = {Vec3(-size, -size, z), Vec3(size, -size * 0.7, z), Vec3(-0.1 * size, size, z)};
  m.triangles = {{0, 1, 2}};
  m.color = color;
  return m;
}

RgbImage random_image(oracle::Rng& rng, int w, int h) {
  RgbImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  return img;
}

Mask random_mask(oracle::Rng& rng, int w, int h, double p) {
  Mask m(w, h);
  for (auto& v : m.data()) v = oracle::uniform(rng, 0, 1) < p ? 255 : 0;
  return m;
}

}  // namespace

TEST(Rasterize, SingleTriangleCoversPrincipalPoint) {
  const TriangleMesh t = triangle(1.0, {255, 0, 0});
  const MeshInstance inst[] = {{&t, RigidTransform::identity()}};
  const Intrinsics k{50.0, 50.0, 16.0, 12.0, 32, 24};
  const RenderLayer layer = rasterize(inst, k);
  EXPECT_EQ(layer.coverage.at(16, 12), 255);
  EXPECT_DOUBLE_EQ(layer.depth.at(16, 12), 1.0);
  EXPECT_EQ(layer.coverage.at(0, 0), 0);
  EXPECT_TRUE(std::isinf(layer.depth.at(0, 0)));
}

TEST(Rasterize, NearerTriangleWins) {
  const TriangleMesh near = triangle(1.0, {255, 0, 0});
  const TriangleMesh far = triangle(2.0, {0, 255, 0}, 0.4);
  for (const bool near_first : {true, false}) {
    std::vector<MeshInstance> inst{{&far, RigidTransform::identity()}, {&near, RigidTransform::identity()}};
    if (near_first) std::swap(inst[0], inst[1]);
    const RenderLayer layer = rasterize(inst, kSmall);
    const MeshInstance only_near[] = {{&near, RigidTransform::identity()}};
    const RenderLayer ref = rasterize(only_near, kSmall);
    for (int y = 0; y < kSmall.height; ++y) {
      for (int x = 0; x < kSmall.width; ++x) {
        if (ref.coverage.at(x, y) != 0) EXPECT_DOUBLE_EQ(layer.depth.at(x, y), 1.0);
      }
    }
  }
}

TEST(Rasterize, SharedEdgeCoveredOnce) {
  // Two triangles of a quad whose diagonal passes exactly through samples.
  TriangleMesh quad;
  quad.vertices = {Vec3(-0.2, -0.2, 1), Vec3(0.2, -0.2, 1), Vec3(0.2, 0.2, 1), Vec3(-0.2, 0.2, 1)};
  const Intrinsics k{50.0, 50.0, 16.0, 12.0, 32, 24};
  for (const int first : {0, 1}) {
    TriangleMesh a = quad, b = quad;
    a.triangles = {{0, 1, 2}};
    b.triangles = {{0, 2, 3}};
    const MeshInstance ia[] = {{&a, RigidTransform::identity()}};
    const MeshInstance ib[] = {{&b, RigidTransform::identity()}};
    const RenderLayer la = rasterize(first == 0 ? ia : ib, k);
    const RenderLayer lb = rasterize(first == 0 ? ib : ia, k);
    for (int x = 7; x <= 25; ++x) {
      const int y = x - 4;  // on the diagonal
      EXPECT_EQ((la.coverage.at(x, y) != 0) + (lb.coverage.at(x, y) != 0), 1) << x;
    }
  }
}

TEST(Rasterize, MatchesScanlineOracleOnRandomMeshes) {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    TriangleMesh m;
    for (int i = 0; i < 30; ++i) {
      const Vec3 c(oracle::uniform(rng, -0.3, 0.3), oracle::uniform(rng, -0.2, 0.2), oracle::uniform(rng, 0.8, 2.0));
      for (int v = 0; v < 3; ++v) m.vertices.push_back(c + 0.15 * oracle::random_unit(rng));
      m.triangles.push_back({3 * i, 3 * i + 1, 3 * i + 2});
    }
    m.color = {static_cast<std::uint8_t>(rng()), 180, 90};
    const std::vector<MeshInstance> inst{{&m, RigidTransform::identity()}};
    const RenderLayer layer = rasterize(inst, kSmall);
    const auto ref = oracle::scanline_render(inst, kSmall);
    EXPECT_EQ(layer.rgb, ref.rgb);
  }
}

TEST(Rasterize, GoldenTwoLinkArm) {
  const auto chain = golden::two_link_arm();
  const RenderLayer layer =
      render_robot(chain, golden::two_link_pose(), 0.0, golden::golden_camera(), golden::golden_extrinsics());
  const RgbImage ref = read_rgb_png(std::filesystem::path(DEMOEDIT_TEST_DATA) / "golden_two_link.png");
  ASSERT_TRUE(layer.rgb.same_size(ref));
  int diff = 0;
  for (std::size_t i = 0; i < ref.data().size(); ++i) diff += ref.data()[i] != layer.rgb.data()[i];
  EXPECT_EQ(diff, 0);
  int covered = 0;
  for (auto v : layer.coverage.data()) covered += v != 0;
  EXPECT_GT(covered, 1000);
}

TEST(Rasterize, Deterministic) {
  const KinematicChain chain = synthetic::default_chain();
  const Intrinsics k{300, 300, 159.5, 119.5, 320, 240};
  const Extrinsics e = golden::golden_extrinsics();
  const RenderLayer a = render_robot(chain, chain.home, 0.7, k, e);
  const RenderLayer b = render_robot(chain, chain.home, 0.7, k, e);
  EXPECT_EQ(a.rgb, b.rgb);
  EXPECT_EQ(a.coverage, b.coverage);
  EXPECT_EQ(a.depth, b.depth);
}

TEST(Composite, OcclusionRule) {
  RenderLayer layer(3, 1);
  for (int x = 0; x < 3; ++x) {
    layer.depth.at(x, 0) = 0.5;
    layer.coverage.at(x, 0) = 255;
    layer.rgb.at(x, 0, 0) = 200;
  }
  DepthImage scene(3, 1);
  scene.at(0, 0) = 400;   // in front of the robot
  scene.at(1, 0) = 1000;  // behind
  scene.at(2, 0) = 0;     // missing
  const RgbImage rgb(3, 1, 7);
  const RgbImage out = composite(rgb, scene, layer, 0.005);
  EXPECT_EQ(out.at(0, 0, 0), 7);
  EXPECT_EQ(out.at(1, 0, 0), 200);
  EXPECT_EQ(out.at(2, 0, 0), 200);
  EXPECT_THROW(composite(RgbImage(2, 1), scene, layer, 0.005), Error);
}

TEST(Composite, EpsBand) {
  RenderLayer layer(2, 1);
  layer.depth.at(0, 0) = 1.004;
  layer.depth.at(1, 0) = 1.006;
  layer.coverage.at(0, 0) = layer.coverage.at(1, 0) = 255;
  layer.rgb.at(0, 0, 1) = layer.rgb.at(1, 0, 1) = 99;
  const DepthImage scene(2, 1, 1000);
  const RgbImage out = composite(RgbImage(2, 1), scene, layer, 0.005);
  EXPECT_EQ(out.at(0, 0, 1), 99);
  EXPECT_EQ(out.at(1, 0, 1), 0);
}

TEST(Inpaint, ConstantImageStaysConstant) {
  oracle::Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const RgbImage img(40, 30, static_cast<std::uint8_t>(rng()));
    EXPECT_EQ(inpaint_fmm(img, random_mask(rng, 40, 30, 0.3), 3), img);
  }
}

TEST(Inpaint, EmptyMaskIsIdentity) {
  oracle::Rng rng(42);
  const RgbImage img = random_image(rng, 20, 10);
  EXPECT_EQ(inpaint_fmm(img, Mask(20, 10), 3), img);
}

TEST(Inpaint, TwoBandStrip) {
  RgbImage img(32, 32);
  Mask mask(32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const std::uint8_t c = y < 16 ? 40 : 210;
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = c;
      if (x >= 14 && x < 18 && y >= 2 && y < 12) {
        mask.at(x, y) = 255;
        for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = 255;  // arm pixels
      }
    }
  }
  const RgbImage out = inpaint_fmm(img, mask, 3);
  for (int y = 2; y < 12; ++y) {
    for (int x = 14; x < 18; ++x) EXPECT_NEAR(out.at(x, y, 0), 40, 2) << x << "," << y;
  }
}

TEST(Inpaint, MatchesLayeredOracle) {
  oracle::Rng rng(43);
  for (const auto [x0, x1] : {std::pair{12, 18}, std::pair{10, 13}, std::pair{0, 4}, std::pair{27, 31}}) {
    RgbImage img(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        img.at(x, y, 0) = static_cast<std::uint8_t>(3 * x + 5 * y);
        img.at(x, y, 1) = static_cast<std::uint8_t>(rng() % 256);
        img.at(x, y, 2) = static_cast<std::uint8_t>(128 + 100 * std::sin(0.4 * x) * std::cos(0.3 * y));
      }
    }
    Mask strip(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = x0; x <= x1; ++x) strip.at(x, y) = 255;
    }
    const RgbImage got = inpaint_fmm(img, strip, 3);
    const RgbImage want = oracle::fill_strip(img, x0, x1, 3);
    for (std::size_t i = 0; i < got.data().size(); ++i) {
      EXPECT_NEAR(got.data()[i], want.data()[i], 2) << "strip " << x0 << "-" << x1 << " index " << i;
    }
  }
}

TEST(Inpaint, OutsideMaskUntouchedAndTranslationInvariant) {
  oracle::Rng rng(44);
  const RgbImage img = random_image(rng, 30, 24);
  Mask mask(30, 24);
  for (int y = 6; y < 14; ++y) {
    for (int x = 5; x < 12 + y % 3; ++x) mask.at(x, y) = 255;
  }
  const RgbImage out = inpaint_fmm(img, mask, 3);
  for (std::size_t p = 0; p < mask.pixel_count(); ++p) {
    if (mask.data()[p] != 0) continue;
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(out.data()[p * 3 + c], img.data()[p * 3 + c]);
  }
  // Shift by (7, 5) inside a larger canvas with the same border content.
  RgbImage big(44, 36);
  Mask big_mask(44, 36);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 30; ++x) {
      for (int c = 0; c < 3; ++c) big.at(x + 7, y + 5, c) = img.at(x, y, c);
      big_mask.at(x + 7, y + 5) = mask.at(x, y);
    }
  }
  const RgbImage big_out = inpaint_fmm(big, big_mask, 3);
  for (int y = 6; y < 14; ++y) {
    for (int x = 5; x < 14; ++x) {
      if (mask.at(x, y) == 0) continue;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(big_out.at(x + 7, y + 5, c), out.at(x, y, c));
    }
  }
}

TEST(MaskOut, Rules) {
  oracle::Rng rng(45);
  const RgbImage img = random_image(rng, 8, 6);
  EXPECT_EQ(mask_out(img, Mask(8, 6)), img);
  EXPECT_EQ(mask_out(img, Mask(8, 6, 255)), RgbImage(8, 6));
  Mask checker(8, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) checker.at(x, y) = (x + y) % 2 ? 255 : 0;
  }
  const RgbImage out = mask_out(img, checker);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(x, y, c), (x + y) % 2 ? 0 : img.at(x, y, c));
    }
  }
  EXPECT_EQ(mask_out(out, checker), out);
}

TEST(DilateMask, Rules) {
  Mask single(7, 7);
  single.at(3, 3) = 255;
  EXPECT_EQ(dilate_mask(single, 0), single);
  const Mask d = dilate_mask(single, 1);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) EXPECT_EQ(d.at(x, y) != 0, std::abs(x - 3) <= 1 && std::abs(y - 3) <= 1);
  }
  oracle::Rng rng(46);
  for (int k = 0; k <= 6; ++k) {
    const Mask m = random_mask(rng, 40, 25, 0.02);
    EXPECT_EQ(dilate_mask(m, k), oracle::dilate(m, k)) << k;
  }
}

TEST(EditMode, Names) {
  for (const EditMode m : {EditMode::InpaintFmm, EditMode::MaskOnly, EditMode::NoEdit}) {
    EXPECT_EQ(parse_edit_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_edit_mode("opencv"), Error);
}
