#include "demoedit/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "demoedit/error.hpp"

namespace demoedit {

using nlohmann::json;

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* key) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, std::string("invalid config value for '") + key + "'");
  };
  icp.validate();
  ik.validate();
  gripper.validate();
  joint_limits.validate();
  require(occlusion_eps >= 0.0, "occlusion_eps");
  require(mask_dilation >= 0, "mask_dilation");
  require(inpaint_radius >= 1, "inpaint_radius");
  require(augmentation.n_variants >= 1, "augmentation.n_variants");
  require(augmentation.max_shift_x >= 0.0 && augmentation.max_shift_y >= 0.0 && augmentation.max_shift_z >= 0.0,
          "augmentation.max_shift_*");
  require(demo_invalid_threshold >= 0.0 && demo_invalid_threshold <= 1.0, "demo_invalid_threshold");
}

namespace {

constexpr const char* kJointNames[kConstrainedJointCount] = {"thumb_ip", "index_pip", "index_dip"};

json to_json_tree(const PipelineConfig& c) {
  json j;
  j["edit_mode"] = std::string(to_string(c.edit_mode));
  j["external_inpainting"] = c.external_inpainting;
  j["icp"] = {{"max_iterations", c.icp.max_iterations},
              {"convergence_eps", c.icp.convergence_eps},
              {"trim_distance", c.icp.trim_distance},
              {"min_correspondences", c.icp.min_correspondences},
              {"max_source_points", c.icp.max_source_points}};
  j["ik"] = {{"damping", c.ik.damping},
             {"max_iterations", c.ik.max_iterations},
             {"pos_tol", c.ik.pos_tol},
             {"rot_tol_deg", c.ik.rot_tol * 180.0 / M_PI},
             {"step_scale", c.ik.step_scale},
             {"max_step_halvings", c.ik.max_step_halvings}};
  j["gripper"] = {{"max_width", c.gripper.max_width}, {"close_percentile", c.gripper.close_percentile}};
  json limits;
  for (int i = 0; i < kConstrainedJointCount; ++i) {
    const auto& r = c.joint_limits.ranges[static_cast<std::size_t>(i)];
    limits[kJointNames[i]] = {r.min_deg, r.max_deg};
  }
  j["joint_limits"] = limits;
  j["occlusion_eps"] = c.occlusion_eps;
  j["mask_dilation"] = c.mask_dilation;
  j["inpaint_radius"] = c.inpaint_radius;
  j["augmentation"] = {{"n_variants", c.augmentation.n_variants},
                       {"max_shift_x", c.augmentation.max_shift_x},
                       {"max_shift_y", c.augmentation.max_shift_y},
                       {"max_shift_z", c.augmentation.max_shift_z},
                       {"rng_seed", c.augmentation.rng_seed}};
  j["demo_invalid_threshold"] = c.demo_invalid_threshold;
  return j;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + where + key + "'");
  }
}

PipelineConfig from_json_tree(const json& j, const std::filesystem::path& base) {
  PipelineConfig c;
  check_keys(j,
             {"edit_mode", "external_inpainting", "icp", "ik", "gripper", "joint_limits", "occlusion_eps",
              "mask_dilation", "inpaint_radius", "augmentation", "demo_invalid_threshold", "robot_chain", "output",
              "demos_root"},
             "");
  if (j.contains("edit_mode")) c.edit_mode = parse_edit_mode(j.at("edit_mode").get<std::string>());
  read(j, "external_inpainting", c.external_inpainting);
  if (j.contains("icp")) {
    const auto& s = j.at("icp");
    check_keys(s, {"max_iterations", "convergence_eps", "trim_distance", "min_correspondences", "max_source_points"},
               "icp.");
    read(s, "max_iterations", c.icp.max_iterations);
    read(s, "convergence_eps", c.icp.convergence_eps);
    read(s, "trim_distance", c.icp.trim_distance);
    read(s, "min_correspondences", c.icp.min_correspondences);
    read(s, "max_source_points", c.icp.max_source_points);
  }
  if (j.contains("ik")) {
    const auto& s = j.at("ik");
    check_keys(s, {"damping", "max_iterations", "pos_tol", "rot_tol_deg", "step_scale", "max_step_halvings"}, "ik.");
    read(s, "damping", c.ik.damping);
    read(s, "max_iterations", c.ik.max_iterations);
    read(s, "pos_tol", c.ik.pos_tol);
    if (s.contains("rot_tol_deg")) c.ik.rot_tol = s.at("rot_tol_deg").get<double>() * M_PI / 180.0;
    read(s, "step_scale", c.ik.step_scale);
    read(s, "max_step_halvings", c.ik.max_step_halvings);
  }
  if (j.contains("gripper")) {
    const auto& s = j.at("gripper");
    check_keys(s, {"max_width", "close_percentile"}, "gripper.");
    read(s, "max_width", c.gripper.max_width);
    read(s, "close_percentile", c.gripper.close_percentile);
  }
  if (j.contains("joint_limits")) {
    const auto& s = j.at("joint_limits");
    check_keys(s, {"thumb_ip", "index_pip", "index_dip"}, "joint_limits.");
    for (int i = 0; i < kConstrainedJointCount; ++i) {
      if (!s.contains(kJointNames[i])) continue;
      const auto& r = s.at(kJointNames[i]);
      c.joint_limits.ranges[static_cast<std::size_t>(i)] = {r.at(0).get<double>(), r.at(1).get<double>()};
    }
  }
  read(j, "occlusion_eps", c.occlusion_eps);
  read(j, "mask_dilation", c.mask_dilation);
  read(j, "inpaint_radius", c.inpaint_radius);
  if (j.contains("augmentation")) {
    const auto& s = j.at("augmentation");
    check_keys(s, {"n_variants", "max_shift_x", "max_shift_y", "max_shift_z", "rng_seed"}, "augmentation.");
    read(s, "n_variants", c.augmentation.n_variants);
    read(s, "max_shift_x", c.augmentation.max_shift_x);
    read(s, "max_shift_y", c.augmentation.max_shift_y);
    read(s, "max_shift_z", c.augmentation.max_shift_z);
    read(s, "rng_seed", c.augmentation.rng_seed);
  }
  read(j, "demo_invalid_threshold", c.demo_invalid_threshold);
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
  };
  if (j.contains("robot_chain")) c.robot_chain = resolve(j.at("robot_chain").get<std::string>());
  if (j.contains("output")) c.output = resolve(j.at("output").get<std::string>());
  if (j.contains("demos_root")) c.demos_root = resolve(j.at("demos_root").get<std::string>());
  return c;
}

}  // namespace

PipelineConfig config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  try {
    c = from_json_tree(json::parse(text), base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), path.parent_path());
}

void apply_override(PipelineConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorCode::InvalidArgument, "override must look like key=value: '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings such as edit_mode=mask_only
  }

  if (key == "robot_chain" || key == "output" || key == "demos_root") {
    const std::filesystem::path p = value.is_string() ? value.get<std::string>() : raw;
    if (key == "robot_chain") cfg.robot_chain = p;
    if (key == "output") cfg.output = p;
    if (key == "demos_root") cfg.demos_root = p;
    return;
  }
  json tree = to_json_tree(cfg);
  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) {
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
  PipelineConfig updated;
  try {
    updated = from_json_tree(tree, {});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "bad value for '" + key + "': " + e.what());
  }
  updated.robot_chain = cfg.robot_chain;
  updated.output = cfg.output;
  updated.demos_root = cfg.demos_root;
  updated.validate();
  cfg = updated;
}

std::string config_to_json(const PipelineConfig& cfg) { return to_json_tree(cfg).dump(2); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const PipelineConfig& cfg) { return fnv1a_hex(config_to_json(cfg)); }

}  // namespace demoedit
