#pragma once

#include <span>
#include <vector>

#include "demoedit/camera.hpp"
#include "demoedit/geometry.hpp"

namespace demoedit {

struct IcpParams {
  int max_iterations = 50;
  double convergence_eps = 1e-6;     // m, change of the trimmed RMS residual
  double trim_distance = 0.02;       // m
  int min_correspondences = 50;
  /// Source clouds larger than this are stride-downsampled before matching.
  int max_source_points = 2000;

  void validate() const;
};

struct IcpResult {
  RigidTransform transform;          // maps source toward target
  double rms_error = 0.0;            // over inliers at the returned transform
  int iterations_used = 0;
  double inlier_fraction = 0.0;
  bool converged = false;
  /// Set when inliers dropped below min_correspondences; `transform` then
  /// holds the best estimate reached before the failure.
  bool too_few_correspondences = false;
  /// Trimmed residual per iteration: sqrt(mean(min(d^2, trim^2))) over all
  /// source points. This is the objective ICP descends, so it never increases.
  std::vector<double> residual_history;
};

/// Least-squares rotation + translation (no scale) taking src onto dst.
/// Reflections are corrected so det(R) = +1. Throws DegenerateGeometry when
/// the sizes differ, fewer than 3 pairs exist or src has rank < 2.
RigidTransform umeyama_align(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Every k-th point so that at most `max_points` remain.
std::vector<Vec3> stride_downsample(std::span<const Vec3> points, std::size_t max_points);

/// Trimmed point-to-point ICP.
IcpResult icp(std::span<const Vec3> source, std::span<const Vec3> target, const RigidTransform& init,
              const IcpParams& params);

}  // namespace demoedit
