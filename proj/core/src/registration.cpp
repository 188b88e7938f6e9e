#include "demoedit/registration.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "demoedit/error.hpp"
#include "demoedit/spatial_index.hpp"

namespace demoedit {

void IcpParams::validate() const {
  if (max_iterations < 1 || !(convergence_eps > 0.0) || !(trim_distance > 0.0) || min_correspondences < 3 ||
      max_source_points < 3) {
    throw Error(ErrorCode::InvalidArgument, "invalid ICP parameters");
  }
}

RigidTransform umeyama_align(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorCode::DegenerateGeometry, "correspondence lists differ in length");
  }
  if (src.size() < 3) {
    throw Error(ErrorCode::DegenerateGeometry, "alignment needs at least 3 correspondences");
  }
  const double n = static_cast<double>(src.size());
  Vec3 mu_s = Vec3::Zero();
  Vec3 mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d spread = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - mu_s;
    cross += (dst[i] - mu_d) * a.transpose();
    spread += a * a.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> spread_svd(spread);
  const auto& sv = spread_svd.singularValues();
  if (!(sv(0) > 0.0 && sv(1) > 1e-12 * sv(0))) {
    throw Error(ErrorCode::DegenerateGeometry, "source points are rank deficient");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) S(2, 2) = -1.0;
  const RotationMatrix R = svd.matrixU() * S * svd.matrixV().transpose();
  return {R, mu_d - R * mu_s};
}

std::vector<Vec3> stride_downsample(std::span<const Vec3> points, std::size_t max_points) {
  if (points.size() <= max_points || max_points == 0) return {points.begin(), points.end()};
  const std::size_t stride = (points.size() + max_points - 1) / max_points;
  std::vector<Vec3> out;
  out.reserve(points.size() / stride + 1);
  for (std::size_t i = 0; i < points.size(); i += stride) out.push_back(points[i]);
  return out;
}

namespace {

struct Matching {
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  double trimmed_sq_sum = 0.0;
  double inlier_sq_sum = 0.0;
};

Matching match(std::span<const Vec3> source, const SpatialIndex& index, const RigidTransform& T, double trim) {
  Matching m;
  m.src.reserve(source.size());
  m.dst.reserve(source.size());
  const double trim2 = trim * trim;
  for (const auto& s : source) {
    const NearestResult nn = index.nearest(apply(T, s));
    const double d2 = nn.distance * nn.distance;
    if (nn.distance <= trim) {
      m.src.push_back(s);
      m.dst.push_back(nn.point);
      m.trimmed_sq_sum += d2;
      m.inlier_sq_sum += d2;
    } else {
      m.trimmed_sq_sum += trim2;
    }
  }
  return m;
}

}  // namespace

IcpResult icp(std::span<const Vec3> source_in, std::span<const Vec3> target, const RigidTransform& init,
              const IcpParams& params) {
  params.validate();
  const std::vector<Vec3> source = stride_downsample(source_in, static_cast<std::size_t>(params.max_source_points));
  if (source.size() < static_cast<std::size_t>(params.min_correspondences)) {
    throw Error(ErrorCode::TooFewCorrespondences, "source cloud smaller than min_correspondences");
  }
  const SpatialIndex index(target);
  const double count = static_cast<double>(source.size());

  IcpResult result;
  RigidTransform current = init;
  auto finish = [&](const Matching& m, const RigidTransform& T) {
    result.transform = T;
    result.rms_error = m.src.empty() ? 0.0 : std::sqrt(m.inlier_sq_sum / static_cast<double>(m.src.size()));
    result.inlier_fraction = static_cast<double>(m.src.size()) / count;
  };

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    Matching m = match(source, index, current, params.trim_distance);
    const double residual = std::sqrt(m.trimmed_sq_sum / count);
    result.residual_history.push_back(residual);
    result.iterations_used = iter + 1;

    if (m.src.size() < static_cast<std::size_t>(params.min_correspondences)) {
      result.too_few_correspondences = true;
      finish(m, current);
      return result;
    }
    const bool settled =
        residual == 0.0 ||
        (iter > 0 && std::abs(result.residual_history[static_cast<std::size_t>(iter) - 1] - residual) <
                         params.convergence_eps);
    if (settled) {
      result.converged = true;
      finish(m, current);
      return result;
    }
    try {
      current = umeyama_align(m.src, m.dst);
    } catch (const Error&) {
      // Inliers collapsed onto a line; keep the last good estimate.
      result.too_few_correspondences = true;
      finish(m, current);
      return result;
    }
  }
  // Iteration budget exhausted: score the last solve.
  Matching m = match(source, index, current, params.trim_distance);
  result.residual_history.push_back(std::sqrt(m.trimmed_sq_sum / count));
  finish(m, current);
  return result;
}

}  // namespace demoedit
