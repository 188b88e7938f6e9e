#pragma once

#include <array>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace demoedit {

/// Cartesian point or direction, meters unless stated otherwise.
using Vec3 = Eigen::Vector3d;
/// Proper rotation (orthonormal, det = +1).
using RotationMatrix = Eigen::Matrix3d;

/// True when R is orthonormal with det = +1 within `tol`.
bool is_rotation(const RotationMatrix& R, double tol = 1e-6);

/// First two columns of a rotation matrix, stored column-major as (a1, a2).
struct Rotation6D {
  std::array<double, 6> values{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

  Vec3 a1() const { return {values[0], values[1], values[2]}; }
  Vec3 a2() const { return {values[3], values[4], values[5]}; }

  friend bool operator==(const Rotation6D&, const Rotation6D&) = default;
};

Rotation6D encode_rot6d(const RotationMatrix& R);

/// Gram-Schmidt decode. Throws DegenerateRotation6D when a1 vanishes or the
/// columns are parallel within 1e-6 rad.
RotationMatrix decode_rot6d(const Rotation6D& r);

/// Element of SE(3): x -> rotation * x + translation.
class RigidTransform {
 public:
  RigidTransform() = default;
  RigidTransform(const RotationMatrix& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) {
    return {RotationMatrix::Identity(), t};
  }
  static RigidTransform from_rotation(const RotationMatrix& R) { return {R, Vec3::Zero()}; }
  /// Row-major 4x4 homogeneous matrix; the bottom row is ignored.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  const RotationMatrix& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Eigen::Matrix4d matrix() const;

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;

 private:
  RotationMatrix rotation_ = RotationMatrix::Identity();
  Vec3 translation_ = Vec3::Zero();
};

/// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& a);
Vec3 apply(const RigidTransform& a, const Vec3& p);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}
inline Vec3 operator*(const RigidTransform& a, const Vec3& p) { return apply(a, p); }

struct PlaneFit {
  Vec3 normal;
  Vec3 centroid;
  double rms = 0.0;
};

/// Total least-squares plane. The normal is oriented toward `viewpoint`
/// (the camera origin in the frame the points are expressed in).
PlaneFit fit_plane(std::span<const Vec3> points, const Vec3& viewpoint = Vec3::Zero());

struct LineFit {
  Vec3 direction;
  Vec3 centroid;
};

/// Principal direction, oriented from the first listed point toward the last.
LineFit fit_line(std::span<const Vec3> points);

// Rotation helpers.
RotationMatrix axis_angle(const Vec3& axis, double angle);
/// Fixed-axis roll/pitch/yaw: Rz(yaw) * Ry(pitch) * Rx(roll).
RotationMatrix rpy(double roll, double pitch, double yaw);
/// Rotation vector (axis * angle) of R, angle in [0, pi].
Vec3 log_so3(const RotationMatrix& R);
/// Geodesic angle between two rotations, radians.
double rotation_distance(const RotationMatrix& a, const RotationMatrix& b);

}  // namespace demoedit
