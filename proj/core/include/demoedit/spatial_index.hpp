#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "demoedit/geometry.hpp"

namespace demoedit {

struct NearestResult {
  std::size_t index = 0;  // insertion order in the source cloud
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
};

/// Static 3-d tree over a point cloud. Immutable after construction, so a
/// single instance may be queried from several threads.
class SpatialIndex {
 public:
  /// Throws EmptyCloud for an empty input.
  explicit SpatialIndex(std::span<const Vec3> points);

  /// Exact nearest neighbor; equal distances resolve to the lowest index.
  NearestResult nearest(const Vec3& query) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::uint32_t begin = 0;  // range into order_
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;            // -1 for leaves
    double split = 0.0;
  };

  int build(std::uint32_t begin, std::uint32_t end);
  void search(int node, const Vec3& q, double& best_d2, std::size_t& best_i) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

inline SpatialIndex build_spatial_index(std::span<const Vec3> points) { return SpatialIndex(points); }
inline NearestResult nearest(const SpatialIndex& index, const Vec3& q) { return index.nearest(q); }

}  // namespace demoedit
