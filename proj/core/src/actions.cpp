#include "demoedit/actions.hpp"

#include <algorithm>
#include <cmath>

#include "demoedit/error.hpp"

namespace demoedit {

void RobotAction::validate() const {
  if (!position.allFinite()) throw Error(ErrorCode::OutOfRange, "action position is not finite");
  if (!(gripper >= 0.0 && gripper <= 1.0)) throw Error(ErrorCode::OutOfRange, "gripper outside [0, 1]");
  decode_rot6d(orientation);
}

void GripperCalibration::validate() const {
  if (!(max_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "gripper max_width must be positive");
  if (!(close_percentile >= 0.0 && close_percentile <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "close_percentile must lie in [0, 100]");
  }
}

void Trajectory::validate() const {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw Error(ErrorCode::InvalidArgument, "timestamps must strictly increase (frame " + std::to_string(i) + ")");
    }
  }
}

Vec3 target_position(const HandKeypoints& kp) {
  const auto [thumb, index] = fingertip_pair(kp);
  return 0.5 * (thumb + index);
}

RotationMatrix target_orientation(const HandKeypoints& kp, const Vec3& viewpoint) {
  std::array<Vec3, 8> pinch;
  std::array<Vec3, 4> thumb;
  for (std::size_t i = 0; i < 4; ++i) {
    thumb[i] = kp[landmark::kThumb[i]];
    pinch[i] = thumb[i];
    pinch[i + 4] = kp[landmark::kIndex[i]];
  }
  const Vec3 x = fit_plane(pinch, viewpoint).normal;
  const Vec3 d = fit_line(thumb).direction;
  Vec3 z = d - d.dot(x) * x;
  const double zn = z.norm();
  if (!(zn > 1e-9)) {
    throw Error(ErrorCode::DegenerateGeometry, "thumb axis is parallel to the pinch-plane normal");
  }
  z /= zn;
  RotationMatrix R;
  R.col(0) = x;
  R.col(1) = z.cross(x);
  R.col(2) = z;
  return R;
}

double fingertip_distance(const HandKeypoints& kp) {
  const auto [thumb, index] = fingertip_pair(kp);
  return (thumb - index).norm();
}

double raw_gripper_width(const HandKeypoints& kp, const GripperCalibration& cal) {
  return std::clamp(fingertip_distance(kp) / cal.max_width, 0.0, 1.0);
}

std::optional<double> nearest_rank_percentile(std::span<const double> values, double percentile) {
  if (values.empty()) return std::nullopt;
  const auto n = values.size();
  const auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) / 100.0));
  if (rank == 0) return std::nullopt;
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t k = std::min(rank, n) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  return sorted[k];
}

Trajectory postprocess_gripper(const Trajectory& traj, const GripperCalibration& cal) {
  Trajectory out = traj;
  std::vector<double> distances;
  for (const auto& f : traj.frames) {
    if (f.valid) distances.push_back(f.raw_distance);
  }
  const auto threshold = nearest_rank_percentile(distances, cal.close_percentile);
  if (!threshold) return out;
  for (auto& f : out.frames) {
    if (f.valid && f.raw_distance <= *threshold) f.action.gripper = 0.0;
  }
  return out;
}

RobotAction extract_action(const HandKeypoints& kp_refined, const Extrinsics& e, const GripperCalibration& cal,
                           const Vec3& viewpoint) {
  const Pose cam{target_position(kp_refined), target_orientation(kp_refined, viewpoint)};
  const Pose robot = to_robot_frame(cam, e);
  RobotAction a;
  a.position = robot.position;
  a.orientation = encode_rot6d(robot.rotation);
  a.gripper = raw_gripper_width(kp_refined, cal);
  return a;
}

}  // namespace demoedit
