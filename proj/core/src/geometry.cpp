#include "demoedit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

constexpr double kParallelTolerance = 1e-6;   // rad
constexpr double kSingularValueFloor = 1e-9;

Eigen::Matrix<double, Eigen::Dynamic, 3> centered(std::span<const Vec3> points, Vec3& centroid) {
  centroid.setZero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix<double, Eigen::Dynamic, 3> m(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (points[i] - centroid).transpose();
  return m;
}

}  // namespace

bool is_rotation(const RotationMatrix& R, double tol) {
  if (!R.allFinite()) return false;
  const double ortho = (R.transpose() * R - RotationMatrix::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Rotation6D encode_rot6d(const RotationMatrix& R) {
  Rotation6D r;
  for (int i = 0; i < 3; ++i) {
    r.values[static_cast<std::size_t>(i)] = R(i, 0);
    r.values[static_cast<std::size_t>(i + 3)] = R(i, 1);
  }
  return r;
}

RotationMatrix decode_rot6d(const Rotation6D& r) {
  const Vec3 a1 = r.a1();
  const Vec3 a2 = r.a2();
  if (!a1.allFinite() || !a2.allFinite()) {
    throw Error(ErrorCode::DegenerateRotation6D, "non-finite 6D rotation");
  }
  const double n1 = a1.norm();
  const double n2 = a2.norm();
  if (n1 == 0.0 || n2 == 0.0) {
    throw Error(ErrorCode::DegenerateRotation6D, "zero-length column");
  }
  const double angle = std::atan2(a1.cross(a2).norm(), a1.dot(a2));
  if (angle <= kParallelTolerance || angle >= M_PI - kParallelTolerance) {
    throw Error(ErrorCode::DegenerateRotation6D, "columns are parallel");
  }
  const Vec3 c1 = a1 / n1;
  Vec3 c2 = a2 - a2.dot(c1) * c1;
  c2.normalize();
  // A second pass removes the residual component left by cancellation when
  // a2 is nearly parallel to a1.
  c2 -= c2.dot(c1) * c1;
  c2.normalize();
  RotationMatrix R;
  R.col(0) = c1;
  R.col(1) = c2;
  R.col(2) = c1.cross(c2);
  return R;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

RigidTransform invert(const RigidTransform& a) {
  const RotationMatrix Rt = a.rotation().transpose();
  return {Rt, -(Rt * a.translation())};
}

Vec3 apply(const RigidTransform& a, const Vec3& p) {
  return a.rotation() * p + a.translation();
}

PlaneFit fit_plane(std::span<const Vec3> points, const Vec3& viewpoint) {
  if (points.size() < 3) {
    throw Error(ErrorCode::DegenerateGeometry, "plane fit needs at least 3 points");
  }
  PlaneFit fit;
  const auto m = centered(points, fit.centroid);
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > kSingularValueFloor)) {
    throw Error(ErrorCode::DegenerateGeometry, "points are collinear");
  }
  fit.normal = svd.matrixV().col(2).normalized();
  const double facing = fit.normal.dot(viewpoint - fit.centroid);
  if (facing < 0.0) {
    fit.normal = -fit.normal;
  } else if (facing == 0.0) {
    // Viewpoint lies in the plane; fall back to a deterministic sign.
    Eigen::Index k = 0;
    fit.normal.cwiseAbs().maxCoeff(&k);
    if (fit.normal(k) < 0.0) fit.normal = -fit.normal;
  }
  fit.rms = std::sqrt((m * fit.normal).squaredNorm() / static_cast<double>(points.size()));
  return fit;
}

LineFit fit_line(std::span<const Vec3> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::DegenerateGeometry, "line fit needs at least 2 points");
  }
  LineFit fit;
  const auto m = centered(points, fit.centroid);
  if (m.rowwise().norm().maxCoeff() <= 1e-12) {
    throw Error(ErrorCode::DegenerateGeometry, "all points coincide");
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(m, Eigen::ComputeFullV);
  fit.direction = svd.matrixV().col(0).normalized();
  const double along = fit.direction.dot(points.back() - points.front());
  if (along < 0.0) {
    fit.direction = -fit.direction;
  } else if (along == 0.0) {
    Eigen::Index k = 0;
    fit.direction.cwiseAbs().maxCoeff(&k);
    if (fit.direction(k) < 0.0) fit.direction = -fit.direction;
  }
  return fit;
}

RotationMatrix axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

RotationMatrix rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 log_so3(const RotationMatrix& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.axis() * aa.angle();
}

double rotation_distance(const RotationMatrix& a, const RotationMatrix& b) {
  const RotationMatrix d = a.transpose() * b;
  const double c = std::clamp((d.trace() - 1.0) / 2.0, -1.0, 1.0);
  // acos is ill-conditioned near 0; use the skew part there.
  const Vec3 s(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
  return std::atan2(0.5 * s.norm(), c);
}

}  // namespace demoedit
