#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "demoedit/geometry.hpp"

namespace demoedit {

/// 21-landmark right-hand layout: 0 wrist, then four joints per finger
/// (thumb 1-4, index 5-8, middle 9-12, ring 13-16, pinky 17-20).
namespace landmark {
inline constexpr int kCount = 21;
inline constexpr int kWrist = 0;
inline constexpr std::array<int, 4> kThumb{1, 2, 3, 4};
inline constexpr std::array<int, 4> kIndex{5, 6, 7, 8};
inline constexpr int kThumbTip = 4;
inline constexpr int kIndexTip = 8;
/// Parent landmark of each landmark in the skeleton; -1 for the wrist.
inline constexpr std::array<int, kCount> kParent{-1, 0, 1, 2, 3, 0, 5, 6, 7, 0, 9, 10, 11, 0, 13, 14, 15, 0, 17, 18, 19};
}  // namespace landmark

inline constexpr int kHandMeshVertexCount = 778;
inline constexpr double kMinBoneLength = 0.005;
inline constexpr double kMaxBoneLength = 0.12;

struct HandKeypoints {
  std::array<Vec3, landmark::kCount> points;

  const Vec3& operator[](int i) const { return points[static_cast<std::size_t>(i)]; }
  Vec3& operator[](int i) { return points[static_cast<std::size_t>(i)]; }

  /// Throws InvalidArgument on non-finite points or bones outside (0.5 cm, 12 cm).
  void validate() const;
};

struct HandMesh {
  std::vector<Vec3> vertices;  // exactly kHandMeshVertexCount

  void validate() const;
};

HandKeypoints transform(const RigidTransform& T, const HandKeypoints& kp);

/// Hinge joints that are constrained: thumb IP (landmark 3, distal bone 3->4),
/// index PIP (6, bone 6->7) and index DIP (7, bone 7->8).
enum class ConstrainedJoint { ThumbIp = 0, IndexPip = 1, IndexDip = 2 };
inline constexpr int kConstrainedJointCount = 3;

struct FlexionRange {
  double min_deg = -5.0;
  double max_deg = 115.0;
};

struct JointLimits {
  std::array<FlexionRange, kConstrainedJointCount> ranges{};

  const FlexionRange& operator[](ConstrainedJoint j) const { return ranges[static_cast<std::size_t>(j)]; }
  FlexionRange& operator[](ConstrainedJoint j) { return ranges[static_cast<std::size_t>(j)]; }
  void validate() const;
};

struct ConstraintReport {
  /// Set for joints whose flexion plane was undefined; those joints are left as-is.
  std::array<bool, kConstrainedJointCount> degenerate{};
  bool any_degenerate() const { return degenerate[0] || degenerate[1] || degenerate[2]; }
};

struct ConstrainedHand {
  HandKeypoints keypoints;
  ConstraintReport report;
};

/// Reduces the thumb IP joint and the index PIP/DIP joints to single-axis
/// hinges with clamped flexion. Each distal bone is projected into the plane
/// spanned by its two preceding bones and rotated (together with anything
/// distal to it) about the joint, so every bone length is preserved.
ConstrainedHand constrain_finger_joints(const HandKeypoints& kp, const JointLimits& limits);

/// Signed flexion angle (rad) of the distal bone at `joint`, measured in the
/// hinge plane. The index DIP is measured about the PIP axis when that one is
/// defined. Throws DegenerateGeometry when the plane is undefined.
double flexion_angle(const HandKeypoints& kp, ConstrainedJoint joint);

struct FingertipPair {
  Vec3 thumb_tip;
  Vec3 index_tip;
};

FingertipPair fingertip_pair(const HandKeypoints& kp);

// Per-frame file formats.
HandKeypoints read_keypoints_json(const std::filesystem::path& path);
void write_keypoints_json(const std::filesystem::path& path, const HandKeypoints& kp);
/// 778 x 3 little-endian float32, row-major (9336 bytes).
HandMesh read_mesh_vertices(const std::filesystem::path& path);
void write_mesh_vertices(const std::filesystem::path& path, const HandMesh& mesh);

}  // namespace demoedit
