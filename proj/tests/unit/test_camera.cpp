#include <gtest/gtest.h>

#include "demoedit/camera.hpp"
#include "demoedit/error.hpp"
#include "random.hpp"

using namespace demoedit;

namespace {

const Intrinsics kCam{500.0, 520.0, 319.5, 239.5, 640, 480};

}  // namespace

TEST(Camera, DeprojectPrincipalPoint) {
  EXPECT_EQ(deproject(kCam.cx, kCam.cy, 1.0, kCam), Vec3(0, 0, 1.0));
  const Vec3 p = deproject(kCam.cx + kCam.fx, kCam.cy, 2.0, kCam);
  EXPECT_NEAR(p.x(), 2.0, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.z(), 2.0, 1e-12);
}

TEST(Camera, NonPositiveDepthRejected) {
  EXPECT_THROW(deproject(1, 1, 0.0, kCam), Error);
  EXPECT_THROW(deproject(1, 1, -1.0, kCam), Error);
}

TEST(Camera, ProjectOpticalAxis) {
  const PixelProjection px = project(Vec3(0, 0, 1), kCam);
  EXPECT_EQ(px.u, kCam.cx);
  EXPECT_EQ(px.v, kCam.cy);
  EXPECT_EQ(px.z, 1.0);
  try {
    project(Vec3(0, 0, -1), kCam);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BehindCamera);
  }
}

TEST(Camera, ProjectDeprojectRoundTrip) {
  oracle::Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = oracle::uniform(rng, 0, 640), v = oracle::uniform(rng, 0, 480), z = oracle::uniform(rng, 0.1, 5);
    const PixelProjection px = project(deproject(u, v, z, kCam), kCam);
    EXPECT_NEAR(px.u, u, 1e-9);
    EXPECT_NEAR(px.v, v, 1e-9);
    EXPECT_NEAR(px.z, z, 1e-9);
  }
}

TEST(MaskedPointCloud, SinglePixel) {
  const Intrinsics k{100.0, 100.0, 2.0, 3.0, 5, 6};
  DepthImage depth(5, 6);
  Mask mask(5, 6);
  depth.at(2, 3) = 2000;
  mask.at(2, 3) = 255;
  depth.at(0, 0) = 1000;  // unmasked
  mask.at(4, 4) = 255;    // masked, no depth
  const PointCloud cloud = masked_point_cloud(depth, mask, k);
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_EQ(cloud[0], Vec3(0, 0, 2.0));
}

TEST(MaskedPointCloud, EmptyIsError) {
  const Intrinsics k{100.0, 100.0, 2.0, 3.0, 5, 6};
  DepthImage depth(5, 6);
  Mask mask(5, 6, 255);
  EXPECT_THROW(masked_point_cloud(depth, mask, k), Error);
}

TEST(MaskedPointCloud, SphereRender) {
  // Ray-sphere intersection per pixel, quantized to mm like a sensor.
  const Intrinsics k{200.0, 200.0, 79.5, 59.5, 160, 120};
  const Vec3 c(0.05, -0.02, 1.0);
  const double r = 0.2;
  DepthImage depth(k.width, k.height);
  Mask mask(k.width, k.height, 255);
  std::vector<Vec3> expected;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 ray((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const double a = ray.squaredNorm(), b = -2.0 * ray.dot(c), cc = c.squaredNorm() - r * r;
      const double disc = b * b - 4 * a * cc;
      if (disc < 0) continue;
      const double t = (-b - std::sqrt(disc)) / (2 * a);
      const auto mm = static_cast<std::uint16_t>(std::lround(t * 1000.0));
      depth.at(u, v) = mm;
      expected.push_back(ray * (mm / 1000.0));
    }
  }
  const PointCloud cloud = masked_point_cloud(depth, mask, k);
  ASSERT_EQ(cloud.size(), expected.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_LT((cloud[i] - expected[i]).norm(), 1e-6);
    EXPECT_LT(std::abs((cloud[i] - c).norm() - r), 0.01);
  }
}

TEST(ToRobotFrame, IdentityAndTranslation) {
  Pose p{Vec3(0.1, 0.2, 0.3), axis_angle(Vec3::UnitX(), 0.4)};
  const Pose same = to_robot_frame(p, Extrinsics{});
  EXPECT_EQ(same.position, p.position);
  EXPECT_EQ(same.rotation, p.rotation);
  const Pose moved = to_robot_frame(Pose{}, Extrinsics{RigidTransform::from_translation(Vec3(0, 0, 1))});
  EXPECT_EQ(moved.position, Vec3(0, 0, 1));
}
