#include "demoedit/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

using json = nlohmann::json;

Intrinsics intrinsics_from(const json& j) {
  Intrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  return k;
}

RigidTransform matrix_from(const json& j) {
  Eigen::Matrix4d m;
  if (j.is_array() && j.size() == 16) {
    for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = j[static_cast<std::size_t>(i)].get<double>();
  } else if (j.is_array() && j.size() == 4) {
    for (int r = 0; r < 4; ++r) {
      const auto& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != 4) throw Error(ErrorCode::SchemaError, "extrinsics row is not 4 wide");
      for (int c = 0; c < 4; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  } else {
    throw Error(ErrorCode::SchemaError, "extrinsics must be a 4x4 row-major matrix");
  }
  const RigidTransform t = RigidTransform::from_matrix(m);
  if (!is_rotation(t.rotation(), 1e-6)) throw Error(ErrorCode::SchemaError, "extrinsics rotation is not orthonormal");
  return t;
}

std::string demo_id_from_dir(const std::filesystem::path& dir) {
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  if (name.rfind("demo_", 0) == 0) name = name.substr(5);
  return name;
}

RigidTransform centroid_alignment(std::span<const Vec3> source, std::span<const Vec3> target) {
  Vec3 cs = Vec3::Zero();
  Vec3 ct = Vec3::Zero();
  for (const auto& p : source) cs += p;
  for (const auto& p : target) ct += p;
  cs /= static_cast<double>(source.size());
  ct /= static_cast<double>(target.size());
  return RigidTransform::from_translation(ct - cs);
}

JointConfig initial_seed(const KinematicChain& chain) {
  if (chain.home.size() == chain.dof()) return chain.clamp(chain.home);
  return chain.clamp(JointConfig::Zero(chain.dof()));
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

double uniform_symmetric(std::mt19937_64& rng, double half_width) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * half_width;
}

}  // namespace

std::filesystem::path frame_file(const std::filesystem::path& dir, std::size_t index, std::string_view ext) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06zu", index);
  return dir / (std::string(name) + std::string(ext));
}

DemoRecord load_demo(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  std::ifstream in(meta_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + meta_path.string());
  DemoRecord demo;
  demo.dir = dir;
  std::vector<double> timestamps;
  try {
    const json j = json::parse(in);
    demo.id = j.contains("id") ? j.at("id").get<std::string>() : demo_id_from_dir(dir);
    demo.intrinsics = intrinsics_from(j.at("intrinsics"));
    demo.extrinsics.camera_to_robot = matrix_from(j.at("extrinsics"));
    timestamps = j.at("timestamps").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, meta_path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), meta_path.string() + ": " + e.what());
  }
  try {
    demo.intrinsics.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, meta_path.string() + ": intrinsics: " + e.what());
  }
  if (timestamps.empty()) throw Error(ErrorCode::DemoInvalid, meta_path.string() + ": no frames");
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1])) {
      throw Error(ErrorCode::DemoInvalid,
                  meta_path.string() + ": timestamps not strictly increasing at frame " + std::to_string(i));
    }
  }
  demo.frames.reserve(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    FrameAssets f;
    f.rgb = frame_file(dir / "rgb", i, ".png");
    f.depth = frame_file(dir / "depth", i, ".png");
    f.mask = frame_file(dir / "mask", i, ".png");
    f.keypoints = frame_file(dir / "keypoints", i, ".json");
    f.vertices = frame_file(dir / "verts", i, ".bin");
    f.inpainted_rgb = frame_file(dir / "rgb_inpainted", i, ".png");
    f.timestamp = timestamps[i];
    demo.frames.push_back(std::move(f));
  }
  return demo;
}

std::filesystem::path resolve_demo_dir(const std::string& demo, const std::filesystem::path& root) {
  const std::filesystem::path direct(demo);
  if (std::filesystem::is_directory(direct) && std::filesystem::exists(direct / "meta.json")) return direct;
  for (const auto& candidate : {root / ("demo_" + demo), root / demo}) {
    if (std::filesystem::is_directory(candidate)) return candidate;
  }
  throw Error(ErrorCode::IoError, "demo not found: " + demo + " (searched " + root.string() + ")");
}

FrameData load_frame(const FrameAssets& assets, const Intrinsics& k) {
  FrameData f;
  try {
    f.rgb = read_rgb_png(assets.rgb);
    f.depth = read_depth_png(assets.depth);
    f.mask = read_mask_png(assets.mask);
    f.keypoints = read_keypoints_json(assets.keypoints);
    f.mesh = read_mesh_vertices(assets.vertices);
    f.mesh.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::FrameInvalid, e.what());
  }
  if (f.rgb.width() != k.width || f.rgb.height() != k.height) {
    throw Error(ErrorCode::FrameInvalid, assets.rgb.string() + ": size differs from the intrinsics");
  }
  if (!f.rgb.same_size(f.depth) || !f.rgb.same_size(f.mask)) {
    throw Error(ErrorCode::FrameInvalid, assets.depth.string() + ": frame assets differ in size");
  }
  return f;
}

RefinedHand refine_hand_pose(const FrameData& frame, const Intrinsics& k, const std::optional<RigidTransform>& prev_T,
                             const PipelineConfig& cfg) {
  PointCloud cloud;
  try {
    cloud = masked_point_cloud(frame.depth, frame.mask, k);
  } catch (const Error& e) {
    throw Error(ErrorCode::FrameInvalid, e.what());
  }
  const auto& source = frame.mesh.vertices;
  const RigidTransform init = prev_T ? *prev_T : centroid_alignment(source, cloud);
  RefinedHand out;
  out.icp = icp(source, cloud, init, cfg.icp);
  if (out.icp.too_few_correspondences && prev_T) {
    // Warm start too far off (large inter-frame motion); retry cold.
    out.icp = icp(source, cloud, centroid_alignment(source, cloud), cfg.icp);
  }
  if (out.icp.too_few_correspondences) {
    throw Error(ErrorCode::FrameInvalid, std::string(to_string(ErrorCode::TooFewCorrespondences)) +
                                             ": registration lost its correspondences");
  }
  auto constrained = constrain_finger_joints(transform(out.icp.transform, frame.keypoints), cfg.joint_limits);
  out.keypoints = constrained.keypoints;
  out.constraints = constrained.report;
  return out;
}

Extrinsics shifted_extrinsics(const Extrinsics& e, const Vec3& shift) {
  return {RigidTransform::from_translation(-shift) * e.camera_to_robot};
}

std::size_t DemoResult::valid_count() const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.valid ? 1 : 0;
  return n;
}

ExtractedDemo extract_demo(const DemoRecord& demo, const PipelineConfig& cfg) {
  ExtractedDemo out;
  out.demo_id = demo.id;
  out.frames.resize(demo.frames.size());
  std::optional<RigidTransform> prev_T;
  for (std::size_t i = 0; i < demo.frames.size(); ++i) {
    auto& ef = out.frames[i];
    ef.timestamp = demo.frames[i].timestamp;
    try {
      const FrameData frame = load_frame(demo.frames[i], demo.intrinsics);
      const RefinedHand refined = refine_hand_pose(frame, demo.intrinsics, prev_T, cfg);
      ef.keypoints = refined.keypoints;
      ef.icp_rms = refined.icp.rms_error;
      ef.action = extract_action(refined.keypoints, demo.extrinsics, cfg.gripper);
      ef.raw_distance = fingertip_distance(refined.keypoints);
      ef.ok = true;
      prev_T = refined.icp.transform;
    } catch (const Error& e) {
      ef.ok = false;
      ef.failure = e.what();
    }
  }
  return out;
}

DemoResult finish_variant(const DemoRecord& demo, const ExtractedDemo& extracted, const PipelineConfig& cfg,
                          const KinematicChain& chain, const VariantSpec& variant, const ProcessOptions& options) {
  if (extracted.frames.size() != demo.frames.size()) {
    throw Error(ErrorCode::InvalidArgument, "extracted frames do not match the demo");
  }
  DemoResult result;
  result.demo_id = demo.id;
  result.variant = variant;
  result.extrinsics = shifted_extrinsics(demo.extrinsics, variant.base_shift);

  Trajectory traj;
  traj.demo_id = demo.id;
  for (const auto& ef : extracted.frames) {
    TrajectoryFrame tf;
    tf.timestamp = ef.timestamp;
    tf.action = ef.action;
    tf.raw_distance = ef.raw_distance;
    tf.valid = ef.ok;
    traj.frames.push_back(tf);
  }
  traj = postprocess_gripper(traj, cfg.gripper);

  result.samples.resize(extracted.frames.size());
  JointConfig seed = initial_seed(chain);
  for (std::size_t i = 0; i < extracted.frames.size(); ++i) {
    const auto& ef = extracted.frames[i];
    auto& s = result.samples[i];
    s.timestamp = ef.timestamp;
    s.provenance = {demo.id, i, variant.index, variant.base_shift};
    if (!ef.ok) {
      s.failure = ef.failure;
      continue;
    }
    s.has_action = true;
    s.action = traj.frames[i].action;
    s.action.position = ef.action.position - variant.base_shift;
    const RigidTransform target(decode_rot6d(s.action.orientation), s.action.position);
    const IkResult ik = inverse_kinematics(chain, target, seed, cfg.ik);
    s.q = ik.q;
    if (!ik.converged) {
      s.failure = "ik_failed";
      continue;
    }
    seed = ik.q;
    s.valid = true;
  }

  const std::size_t n = result.samples.size();
  const std::size_t invalid = n - result.valid_count();
  if (static_cast<double>(invalid) > cfg.demo_invalid_threshold * static_cast<double>(n)) {
    throw Error(ErrorCode::DemoInvalid, "demo " + demo.id + ": " + std::to_string(invalid) + " of " +
                                            std::to_string(n) + " frames invalid");
  }

  if (options.render) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = result.samples[i];
      if (!s.valid) continue;
      try {
        const FrameData frame = load_frame(demo.frames[i], demo.intrinsics);
        s.image = edit_frame(frame, demo.frames[i], cfg, chain, s.q, s.action.gripper, demo.intrinsics,
                             result.extrinsics);
      } catch (const Error& e) {
        s.valid = false;
        s.failure = e.what();
      }
    }
  }
  return result;
}

DemoResult process_demo(const DemoRecord& demo, const PipelineConfig& cfg, const KinematicChain& chain,
                        const VariantSpec& variant, const ProcessOptions& options) {
  return finish_variant(demo, extract_demo(demo, cfg), cfg, chain, variant, options);
}

std::vector<VariantSpec> augmentation_variants(const std::string& demo_id, const AugmentationConfig& aug) {
  if (aug.n_variants < 1) throw Error(ErrorCode::InvalidArgument, "augmentation.n_variants must be >= 1");
  std::mt19937_64 rng(aug.rng_seed ^ fnv1a64(demo_id));
  std::vector<VariantSpec> out;
  out.push_back({0, Vec3::Zero()});
  for (int v = 1; v < aug.n_variants; ++v) {
    Vec3 s;
    s.x() = uniform_symmetric(rng, aug.max_shift_x);
    s.y() = uniform_symmetric(rng, aug.max_shift_y);
    s.z() = uniform_symmetric(rng, aug.max_shift_z);
    out.push_back({v, s});
  }
  return out;
}

std::vector<VariantOutcome> augment_extrinsics(const DemoRecord& demo, const PipelineConfig& cfg,
                                               const KinematicChain& chain, const ProcessOptions& options) {
  const ExtractedDemo extracted = extract_demo(demo, cfg);
  std::vector<VariantOutcome> out;
  for (const auto& v : augmentation_variants(demo.id, cfg.augmentation)) {
    VariantOutcome o;
    o.variant = v;
    try {
      o.result = finish_variant(demo, extracted, cfg, chain, v, options);
    } catch (const Error& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

RgbImage edit_frame(const FrameData& frame, const FrameAssets& assets, const PipelineConfig& cfg,
                    const KinematicChain& chain, const JointConfig& q, double gripper, const Intrinsics& k,
                    const Extrinsics& e) {
  const Mask arm = dilate_mask(frame.mask, cfg.mask_dilation);
  RgbImage base;
  if (cfg.external_inpainting) {
    try {
      base = read_rgb_png(assets.inpainted_rgb);
    } catch (const Error& err) {
      throw Error(ErrorCode::FrameInvalid, err.what());
    }
    if (!base.same_size(frame.rgb)) {
      throw Error(ErrorCode::FrameInvalid, assets.inpainted_rgb.string() + ": size differs from the frame");
    }
  } else {
    switch (cfg.edit_mode) {
      case EditMode::InpaintFmm: base = inpaint_fmm(frame.rgb, arm, cfg.inpaint_radius); break;
      case EditMode::MaskOnly: base = mask_out(frame.rgb, arm); break;
      case EditMode::NoEdit: base = frame.rgb; break;
    }
  }
  DepthImage depth = frame.depth;
  for (std::size_t i = 0; i < arm.pixel_count(); ++i) {
    if (arm.data()[i] != 0) depth.data()[i] = 0;
  }
  const RenderLayer layer = render_robot(chain, q, gripper, k, e);
  return composite(base, depth, layer, cfg.occlusion_eps);
}

}  // namespace demoedit
