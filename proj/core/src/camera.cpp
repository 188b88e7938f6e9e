#include "demoedit/camera.hpp"

#include <cmath>

#include "demoedit/error.hpp"

namespace demoedit {

void Intrinsics::validate() const {
  const bool ok = std::isfinite(fx) && std::isfinite(fy) && fx > 0.0 && fy > 0.0 && width > 0 && height > 0 &&
                  cx >= 0.0 && cx < width && cy >= 0.0 && cy < height;
  if (!ok) throw Error(ErrorCode::InvalidArgument, "invalid camera intrinsics");
}

Vec3 deproject(double u, double v, double depth_m, const Intrinsics& k) {
  if (!(depth_m > 0.0)) {
    throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  }
  return {(u - k.cx) * depth_m / k.fx, (v - k.cy) * depth_m / k.fy, depth_m};
}

PixelProjection project(const Vec3& p, const Intrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy, p.z()};
}

PointCloud masked_point_cloud(const DepthImage& depth, const Mask& mask, const Intrinsics& k) {
  if (!depth.same_size(mask) || depth.width() != k.width || depth.height() != k.height) {
    throw Error(ErrorCode::DimensionMismatch, "depth, mask and intrinsics disagree on image size");
  }
  PointCloud cloud;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const std::uint16_t d = depth.at(u, v);
      if (mask.at(u, v) == 0 || d == 0) continue;
      cloud.push_back(deproject(u, v, depth_to_meters(d), k));
    }
  }
  if (cloud.empty()) {
    throw Error(ErrorCode::EmptyCloud, "no masked pixel has valid depth");
  }
  return cloud;
}

Pose to_robot_frame(const Pose& pose_cam, const Extrinsics& e) {
  return {apply(e.camera_to_robot, pose_cam.position), e.camera_to_robot.rotation() * pose_cam.rotation};
}

}  // namespace demoedit
