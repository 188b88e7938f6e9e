#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "demoedit/geometry.hpp"
#include "demoedit/mesh.hpp"

namespace demoedit {

using JointConfig = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Revolute joint. The joint frame is parent_frame * origin * Rot(axis, q).
struct Joint {
  std::string name;
  RigidTransform origin;
  Vec3 axis = Vec3::UnitZ();
  double lower = -M_PI;
  double upper = M_PI;
  std::optional<TriangleMesh> mesh;  // child link geometry in the joint frame
};

/// Parallel-jaw gripper. Meshes are expressed in the end-effector frame:
/// fingers slide along +/-y, the approach direction is +z.
struct GripperModel {
  double max_travel = 0.04;  // per finger, m
  std::optional<TriangleMesh> hand_mesh;
  std::optional<TriangleMesh> finger_mesh;  // the +y finger at zero opening
};

struct KinematicChain {
  std::string name;
  std::optional<TriangleMesh> base_mesh;
  std::vector<Joint> joints;
  RigidTransform ee_offset;  // last joint frame -> end-effector frame
  GripperModel gripper;
  JointConfig home;          // seed for the first frame; zeros when empty

  int dof() const { return static_cast<int>(joints.size()); }
  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
  JointConfig clamp(const JointConfig& q) const;
  bool within_limits(const JointConfig& q) const;
};

struct FkResult {
  std::vector<RigidTransform> link_poses;  // base frame, one per joint
  RigidTransform ee_pose;
};

/// Throws ConfigLengthMismatch when q.size() != chain.dof().
FkResult forward_kinematics(const KinematicChain& chain, const JointConfig& q);

/// Geometric Jacobian in the base frame: rows 0-2 linear, 3-5 angular.
Jacobian jacobian(const KinematicChain& chain, const JointConfig& q);

struct IkParams {
  double damping = 0.01;
  int max_iterations = 200;
  double pos_tol = 1e-3;                 // m
  double rot_tol = 0.5 * M_PI / 180.0;   // rad
  double step_scale = 1.0;
  int max_step_halvings = 12;

  void validate() const;
};

struct IkResult {
  JointConfig q;
  double position_error = 0.0;  // m
  double rotation_error = 0.0;  // rad
  bool converged = false;
  int iterations = 0;
  /// Combined error norm after every accepted step (first entry: the seed).
  std::vector<double> error_history;
};

/// Pose error (target - current): translation difference and rotation vector
/// of target * current^T, stacked.
Eigen::Matrix<double, 6, 1> pose_error(const RigidTransform& target, const RigidTransform& current);

/// Damped least squares with joint-limit clamping and step halving whenever a
/// step would increase the error. Always returns the best configuration found.
IkResult inverse_kinematics(const KinematicChain& chain, const RigidTransform& target, const JointConfig& seed,
                            const IkParams& params);

/// Per-finger displacement for a normalized opening. Throws OutOfRange
/// unless 0 <= g <= 1.
double gripper_joint_from_width(const KinematicChain& chain, double g);

/// Loads the JSON chain description; mesh paths resolve against the file's
/// directory. With load_meshes = false only kinematics are read.
KinematicChain load_chain(const std::filesystem::path& path, bool load_meshes = true);

}  // namespace demoedit
