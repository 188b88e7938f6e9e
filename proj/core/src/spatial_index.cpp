#include "demoedit/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

constexpr std::uint32_t kLeafSize = 8;

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw Error(ErrorCode::EmptyCloud, "cannot index an empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0U);
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(order_.size()));
}

int SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi(axis) == lo(axis)) return id;  // all points identical

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a](axis);
                     const double pb = points_[b](axis);
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]](axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void SpatialIndex::search(int node_id, const Vec3& q, double& best_d2, std::size_t& best_i) const {
  const Node& n = nodes_[static_cast<std::size_t>(node_id)];
  if (n.axis < 0) {
    for (std::uint32_t k = n.begin; k < n.end; ++k) {
      const std::uint32_t i = order_[k];
      const double d2 = squared_distance(points_[i], q);
      if (d2 < best_d2 || (d2 == best_d2 && i < best_i)) {
        best_d2 = d2;
        best_i = i;
      }
    }
    return;
  }
  // Left subtree holds coordinates <= split, right holds >= split.
  const double diff = q(n.axis) - n.split;
  const int near_child = diff < 0.0 ? n.left : n.right;
  const int far_child = diff < 0.0 ? n.right : n.left;
  search(near_child, q, best_d2, best_i);
  // Visit the far side on ties too so the lowest-index rule stays exact.
  if (diff * diff <= best_d2) search(far_child, q, best_d2, best_i);
}

NearestResult SpatialIndex::nearest(const Vec3& query) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = std::numeric_limits<std::size_t>::max();
  search(0, query, best_d2, best_i);
  return {best_i, points_[best_i], std::sqrt(best_d2)};
}

}  // namespace demoedit
