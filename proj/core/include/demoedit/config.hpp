#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "demoedit/actions.hpp"
#include "demoedit/compositor.hpp"
#include "demoedit/handpose.hpp"
#include "demoedit/registration.hpp"
#include "demoedit/robot.hpp"

namespace demoedit {

struct AugmentationConfig {
  int n_variants = 1;
  double max_shift_x = 0.20;  // m, along the robot-base x-axis
  double max_shift_y = 0.0;
  double max_shift_z = 0.0;
  std::uint64_t rng_seed = 0;
};

struct PipelineConfig {
  EditMode edit_mode = EditMode::InpaintFmm;
  /// Use externally inpainted frames from <demo>/rgb_inpainted/ instead of
  /// running arm removal in-process.
  bool external_inpainting = false;
  IcpParams icp;
  IkParams ik;
  GripperCalibration gripper;
  JointLimits joint_limits;
  double occlusion_eps = 0.005;  // m
  int mask_dilation = 5;         // px
  int inpaint_radius = 3;        // px
  AugmentationConfig augmentation;
  double demo_invalid_threshold = 0.5;

  std::filesystem::path robot_chain;
  std::filesystem::path output = "out";
  std::filesystem::path demos_root = ".";

  /// Throws InvalidArgument naming the offending key.
  void validate() const;
};

/// Reads a JSON config. Relative paths resolve against the file's directory.
/// Keys that are absent keep their defaults; unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one "dotted.key=value" override, e.g. "icp.trim_distance=0.03".
void apply_override(PipelineConfig& cfg, std::string_view assignment);

/// Every processing parameter as nested JSON text. Paths are left out so the
/// text (and its hash) does not depend on where inputs or outputs live.
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});

/// 64-bit FNV-1a of config_to_json(cfg), as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace demoedit
