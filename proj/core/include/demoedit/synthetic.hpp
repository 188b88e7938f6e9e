#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "demoedit/camera.hpp"
#include "demoedit/handpose.hpp"
#include "demoedit/mesh.hpp"
#include "demoedit/robot.hpp"

namespace demoedit::synthetic {

/// 7-DOF arm with Panda-like kinematics and box/cylinder link geometry.
KinematicChain default_chain();

/// Writes <dir>/robot.json plus one STL per link; returns the JSON path.
std::filesystem::path write_default_chain(const std::filesystem::path& dir);

/// Hand keypoints in the gripper frame for fingertip distance `width`: thumb
/// and index lie in the x = 0 plane, the thumb axis is +z, the tips sit at
/// (0, -width/2, 0) and (0, +width/2, 0).
HandKeypoints hand_keypoints_local(double width);

/// Rigid hand surface in the gripper frame: a bumpy sheet x = h(y, z).
double hand_surface_height(double y, double z);
/// Triangulated sheet, `ny` x `nz` grid.
TriangleMesh hand_surface_mesh(int ny, int nz);
/// The 778 estimator vertices sampled on the sheet.
std::vector<Vec3> hand_vertices_local();

struct DemoSpec {
  std::string id = "d1";
  int frames = 100;
  int width = 640;
  int height = 480;
  double focal = 600.0;
  std::uint64_t seed = 1;
  /// Estimator error: peak translation (m) and rotation (rad) applied to the
  /// written keypoints and vertices.
  double error_translation = 0.02;
  double error_rotation = 0.05;
  /// Frames whose depth image is replaced by an unreadable file.
  std::vector<int> corrupt_depth_frames;
  /// Also write rgb_inpainted/ (the scene rendered without the hand).
  bool write_inpainted = false;
};

struct GroundTruth {
  Intrinsics intrinsics;
  Extrinsics extrinsics;
  std::vector<double> timestamps;
  std::vector<RigidTransform> gripper_poses;  // robot frame
  std::vector<double> fingertip_distance;     // m
  std::vector<HandKeypoints> keypoints;       // camera frame, true
  std::vector<RigidTransform> estimator_error;  // written = error^-1 * true
};

/// Pure ground truth (no files).
GroundTruth ground_truth(const DemoSpec& spec);

/// Renders and writes demo_<id>/ under `root`; returns the ground truth.
GroundTruth write_demo(const std::filesystem::path& root, const DemoSpec& spec);

/// Writes a JSON pipeline config referencing `chain_path`.
void write_config(const std::filesystem::path& path, const std::filesystem::path& chain_path,
                  const std::filesystem::path& demos_root, const std::filesystem::path& output);

}  // namespace demoedit::synthetic
