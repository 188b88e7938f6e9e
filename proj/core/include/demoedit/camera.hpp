#pragma once

#include <vector>

#include "demoedit/geometry.hpp"
#include "demoedit/image.hpp"

namespace demoedit {

/// Pinhole intrinsics for a pre-rectified camera (no distortion model).
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

struct Extrinsics {
  RigidTransform camera_to_robot;
};

using PointCloud = std::vector<Vec3>;

struct PixelProjection {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  RotationMatrix rotation = RotationMatrix::Identity();
};

/// Throws InvalidDepth when depth_m <= 0.
Vec3 deproject(double u, double v, double depth_m, const Intrinsics& k);

/// No bounds clipping. Throws BehindCamera when p.z <= 0.
PixelProjection project(const Vec3& p, const Intrinsics& k);

/// One camera-frame point per set mask pixel with nonzero depth, in
/// row-major pixel order. Throws DimensionMismatch or EmptyCloud.
PointCloud masked_point_cloud(const DepthImage& depth, const Mask& mask, const Intrinsics& k);

Pose to_robot_frame(const Pose& pose_cam, const Extrinsics& e);

}  // namespace demoedit
