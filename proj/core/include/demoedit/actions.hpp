#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demoedit/camera.hpp"
#include "demoedit/geometry.hpp"
#include "demoedit/handpose.hpp"

namespace demoedit {

/// End-effector pose plus normalized gripper opening (0 closed, 1 open).
struct RobotAction {
  Vec3 position = Vec3::Zero();
  Rotation6D orientation;
  double gripper = 0.0;

  /// Throws OutOfRange / DegenerateRotation6D when an invariant is broken.
  void validate() const;

  friend bool operator==(const RobotAction&, const RobotAction&) = default;
};

struct GripperCalibration {
  double max_width = 0.08;         // m of fingertip distance mapped to g = 1
  double close_percentile = 20.0;  // frames at or below this percentile close

  void validate() const;
};

struct TrajectoryFrame {
  double timestamp = 0.0;
  RobotAction action;
  double raw_distance = 0.0;  // fingertip distance, m
  bool valid = true;
};

struct Trajectory {
  std::string demo_id;
  std::vector<TrajectoryFrame> frames;

  /// Throws InvalidArgument unless timestamps strictly increase.
  void validate() const;
};

Vec3 target_position(const HandKeypoints& kp);

/// Columns (x, y, z): x is the normal of the plane through the thumb and
/// index keypoints (facing `viewpoint`), z is the thumb axis made orthogonal
/// to x, y = z cross x.
RotationMatrix target_orientation(const HandKeypoints& kp, const Vec3& viewpoint = Vec3::Zero());

double fingertip_distance(const HandKeypoints& kp);
double raw_gripper_width(const HandKeypoints& kp, const GripperCalibration& cal);

/// Nearest-rank percentile: the value at 1-based rank ceil(p/100 * n) of the
/// sorted sample. Returns nullopt when the rank is zero (p = 0 or no data).
std::optional<double> nearest_rank_percentile(std::span<const double> values, double percentile);

/// Closes (g = 0) every valid frame whose raw distance is at or below the
/// close percentile of the valid frames' distances. Other frames untouched.
Trajectory postprocess_gripper(const Trajectory& traj, const GripperCalibration& cal);

/// Action from refined camera-frame keypoints, expressed in the robot frame.
/// The gripper value is the raw normalized width, before the percentile rule.
RobotAction extract_action(const HandKeypoints& kp_refined, const Extrinsics& e, const GripperCalibration& cal,
                           const Vec3& viewpoint = Vec3::Zero());

}  // namespace demoedit
