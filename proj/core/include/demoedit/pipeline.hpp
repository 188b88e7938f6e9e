#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "demoedit/actions.hpp"
#include "demoedit/camera.hpp"
#include "demoedit/compositor.hpp"
#include "demoedit/config.hpp"
#include "demoedit/handpose.hpp"
#include "demoedit/registration.hpp"
#include "demoedit/robot.hpp"

namespace demoedit {

struct FrameAssets {
  std::filesystem::path rgb;
  std::filesystem::path depth;
  std::filesystem::path mask;
  std::filesystem::path keypoints;
  std::filesystem::path vertices;
  std::filesystem::path inpainted_rgb;  // only read with external_inpainting
  double timestamp = 0.0;
};

/// One human demonstration on disk (demo_<id>/ with rgb/, depth/, mask/,
/// keypoints/, verts/ and meta.json).
struct DemoRecord {
  std::string id;
  std::filesystem::path dir;
  std::vector<FrameAssets> frames;
  Intrinsics intrinsics;
  Extrinsics extrinsics;
};

std::filesystem::path frame_file(const std::filesystem::path& dir, std::size_t index, std::string_view ext);

/// Parses meta.json and lists frame assets. Missing frame files are not an
/// error here; they invalidate only their own frame during processing.
DemoRecord load_demo(const std::filesystem::path& dir);

/// Resolves a --demo argument: an existing directory, or demo_<id> under root.
std::filesystem::path resolve_demo_dir(const std::string& demo, const std::filesystem::path& root);

struct FrameData {
  RgbImage rgb;
  DepthImage depth;
  Mask mask;
  HandKeypoints keypoints;
  HandMesh mesh;
};

/// Throws FrameInvalid when any asset is missing, unreadable or mis-sized.
FrameData load_frame(const FrameAssets& assets, const Intrinsics& k);

struct RefinedHand {
  HandKeypoints keypoints;
  IcpResult icp;
  ConstraintReport constraints;
};

/// Registers the estimated mesh to the masked depth cloud, moves the
/// keypoints by the same transform, then applies the finger-joint
/// constraints. Without a warm start the initial guess aligns centroids; a
/// warm start that loses its correspondences is retried from centroids.
/// Throws FrameInvalid (wrapping EmptyCloud / TooFewCorrespondences).
RefinedHand refine_hand_pose(const FrameData& frame, const Intrinsics& k, const std::optional<RigidTransform>& prev_T,
                             const PipelineConfig& cfg);

struct Provenance {
  std::string demo_id;
  std::size_t frame_index = 0;
  int variant = 0;
  Vec3 base_shift = Vec3::Zero();
};

struct EditedSample {
  std::optional<RgbImage> image;  // absent for invalid frames and action-only runs
  RobotAction action;
  double timestamp = 0.0;
  bool valid = false;
  bool has_action = false;        // false when refinement or extraction failed
  JointConfig q;                  // IK solution used for the overlay
  std::string failure;            // reason when !valid
  Provenance provenance;
};

struct VariantSpec {
  int index = 0;
  Vec3 base_shift = Vec3::Zero();  // robot base displacement, robot frame
};

/// Extrinsics after moving the robot base by `shift` (expressed in the
/// original robot frame): camera points map to p - shift.
Extrinsics shifted_extrinsics(const Extrinsics& e, const Vec3& shift);

struct DemoResult {
  std::string demo_id;
  VariantSpec variant;
  Extrinsics extrinsics;  // the variant's camera-to-robot transform
  std::vector<EditedSample> samples;
  std::size_t valid_count() const;
};

struct ProcessOptions {
  bool render = true;  // false: actions only
};

/// Per-frame result of refinement and action extraction, in the demo's
/// original robot frame. Shared by every augmentation variant.
struct ExtractedFrame {
  double timestamp = 0.0;
  bool ok = false;
  std::string failure;
  HandKeypoints keypoints;  // refined, camera frame
  RobotAction action;       // gripper holds the raw normalized width
  double raw_distance = 0.0;
  double icp_rms = 0.0;
};

struct ExtractedDemo {
  std::string demo_id;
  std::vector<ExtractedFrame> frames;
};

/// Refinement and extraction for every frame, warm-starting ICP from the
/// previous successful frame.
ExtractedDemo extract_demo(const DemoRecord& demo, const PipelineConfig& cfg);

/// Gripper rule, IK and (optionally) image editing for one variant.
DemoResult finish_variant(const DemoRecord& demo, const ExtractedDemo& extracted, const PipelineConfig& cfg,
                          const KinematicChain& chain, const VariantSpec& variant, const ProcessOptions& options = {});

/// Runs refine -> extract -> gripper rule -> IK (warm-started) -> arm
/// removal -> render -> composite for every frame. Throws DemoInvalid when
/// the invalid fraction exceeds cfg.demo_invalid_threshold.
DemoResult process_demo(const DemoRecord& demo, const PipelineConfig& cfg, const KinematicChain& chain,
                        const VariantSpec& variant = {}, const ProcessOptions& options = {});

/// Base shifts for every variant: variant 0 is unshifted, the rest draw
/// uniformly from [-max, +max] per axis. Depends only on the seed and demo id.
std::vector<VariantSpec> augmentation_variants(const std::string& demo_id, const AugmentationConfig& aug);

struct VariantOutcome {
  VariantSpec variant;
  std::optional<DemoResult> result;
  std::string error;  // set when the variant failed as a whole
};

/// process_demo once per augmentation variant; a failing variant does not
/// affect the others.
std::vector<VariantOutcome> augment_extrinsics(const DemoRecord& demo, const PipelineConfig& cfg,
                                               const KinematicChain& chain, const ProcessOptions& options = {});

/// Edited image for one frame given its (already solved) joint configuration.
RgbImage edit_frame(const FrameData& frame, const FrameAssets& assets, const PipelineConfig& cfg,
                    const KinematicChain& chain, const JointConfig& q, double gripper, const Intrinsics& k,
                    const Extrinsics& e);

}  // namespace demoedit
