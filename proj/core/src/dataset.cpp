#include "demoedit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json camera_json(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

Intrinsics camera_from(const json& j) {
  Intrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  return k;
}

Vec3 vec_from(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::SchemaError, std::string(field) + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json matrix_json(const RigidTransform& t) {
  const Eigen::Matrix4d m = t.matrix();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  return rows;
}

RigidTransform matrix_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::SchemaError, "extrinsics: expected 4 rows");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 4) throw Error(ErrorCode::SchemaError, "extrinsics: expected 4 columns");
    for (int c = 0; c < 4; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return RigidTransform::from_matrix(m);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "missing file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

DatasetManifest manifest_from(const json& j) {
  DatasetManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kDatasetFormatVersion) {
    throw Error(ErrorCode::SchemaError, "format_version " + std::to_string(m.format_version) + " is not supported");
  }
  m.robot_model_id = j.at("robot_model_id").get<std::string>();
  m.images = j.at("images").get<bool>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.camera = camera_from(j.at("camera"));
  for (const auto& d : j.at("demos")) {
    ManifestEntry e;
    e.demo_id = d.at("demo_id").get<std::string>();
    e.variant = d.at("variant").get<int>();
    e.dir = d.at("dir").get<std::string>();
    e.frame_count = d.at("frame_count").get<std::size_t>();
    e.valid_count = d.at("valid_count").get<std::size_t>();
    e.base_shift = vec_from(d.at("base_shift"), "base_shift");
    e.config_hash = d.at("config_hash").get<std::string>();
    m.demos.push_back(std::move(e));
  }
  return m;
}

json manifest_json(const DatasetManifest& m) {
  json demos = json::array();
  for (const auto& e : m.demos) {
    demos.push_back({{"demo_id", e.demo_id},
                     {"variant", e.variant},
                     {"dir", e.dir},
                     {"frame_count", e.frame_count},
                     {"valid_count", e.valid_count},
                     {"base_shift", vec_json(e.base_shift)},
                     {"config_hash", e.config_hash}});
  }
  return {{"format_version", m.format_version},
          {"robot_model_id", m.robot_model_id},
          {"images", m.images},
          {"config_hash", m.config_hash},
          {"camera", camera_json(m.camera)},
          {"demos", demos}};
}

fs::path frame_png(const fs::path& variant_dir, std::size_t frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06zu.png", frame);
  return variant_dir / "frames" / name;
}

std::vector<ActionRecord> read_actions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaError, "missing file " + path.string());
  std::vector<ActionRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(parse_action_record(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path.string() + ": frame " + std::to_string(n) + ": " + e.what());
    }
    ++n;
  }
  return out;
}

void sort_entries(std::vector<ManifestEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return a.demo_id != b.demo_id ? a.demo_id < b.demo_id : a.variant < b.variant;
  });
}

}  // namespace

std::string to_jsonl_line(const ActionRecord& r) {
  json j = {{"t", r.t},
            {"p", vec_json(r.p)},
            {"r6", json(r.r6.values)},
            {"g", r.g},
            {"valid", r.valid}};
  if (r.q) j["q"] = std::vector<double>(r.q->data(), r.q->data() + r.q->size());
  return j.dump();
}

ActionRecord parse_action_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed record: ") + e.what());
  }
  ActionRecord r;
  const auto field = [&](const char* name) -> const json& {
    if (!j.contains(name)) throw Error(ErrorCode::SchemaError, std::string("missing field ") + name);
    return j.at(name);
  };
  try {
    r.t = field("t").get<double>();
    r.p = vec_from(field("p"), "p");
    const auto& r6 = field("r6");
    if (!r6.is_array() || r6.size() != 6) throw Error(ErrorCode::SchemaError, "r6: expected 6 numbers");
    for (std::size_t i = 0; i < 6; ++i) r.r6.values[i] = r6[i].get<double>();
    r.g = field("g").get<double>();
    r.valid = field("valid").get<bool>();
    if (j.contains("q")) {
      const auto q = j.at("q").get<std::vector<double>>();
      r.q = Eigen::Map<const JointConfig>(q.data(), static_cast<Eigen::Index>(q.size()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("bad field type: ") + e.what());
  }
  return r;
}

std::string variant_dir_name(const std::string& demo_id, int variant) {
  return "demo_" + demo_id + "_v" + std::to_string(variant);
}

DatasetManifest make_manifest(std::span<const DemoResult> results, const PipelineConfig& cfg,
                              const KinematicChain& chain, const Intrinsics& camera, bool images) {
  DatasetManifest m;
  m.robot_model_id = chain.name;
  m.images = images;
  m.config_hash = config_hash(cfg);
  m.camera = camera;
  for (const auto& r : results) {
    ManifestEntry e;
    e.demo_id = r.demo_id;
    e.variant = r.variant.index;
    e.dir = variant_dir_name(r.demo_id, r.variant.index);
    e.frame_count = r.samples.size();
    e.valid_count = r.valid_count();
    e.base_shift = r.variant.base_shift;
    e.config_hash = m.config_hash;
    m.demos.push_back(std::move(e));
  }
  sort_entries(m.demos);
  return m;
}

ManifestEntry write_variant(const fs::path& root, const DemoResult& result, const std::string& hash, bool images) {
  ManifestEntry e;
  e.demo_id = result.demo_id;
  e.variant = result.variant.index;
  e.dir = variant_dir_name(result.demo_id, result.variant.index);
  e.frame_count = result.samples.size();
  e.valid_count = result.valid_count();
  e.base_shift = result.variant.base_shift;
  e.config_hash = hash;

  const fs::path dir = root / e.dir;
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (dir / "frames").string() + ": " + ec.message());

  std::string lines;
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    const auto& s = result.samples[i];
    ActionRecord r;
    r.t = s.timestamp;
    r.valid = s.valid;
    if (s.has_action) {
      r.p = s.action.position;
      r.r6 = s.action.orientation;
      r.g = s.action.gripper;
      if (s.q.size() > 0) r.q = s.q;
    }
    lines += to_jsonl_line(r);
    lines += '\n';
    if (images && s.valid) {
      if (!s.image) throw Error(ErrorCode::InvalidArgument, "valid frame " + std::to_string(i) + " has no image");
      write_png(frame_png(dir, i), *s.image);
    }
  }
  write_text(dir / "actions.jsonl", lines);

  const json meta = {{"demo_id", result.demo_id},
                     {"variant", result.variant.index},
                     {"base_shift", vec_json(result.variant.base_shift)},
                     {"extrinsics", matrix_json(result.extrinsics.camera_to_robot)}};
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  return e;
}

void write_manifest(const fs::path& root, const DatasetManifest& manifest) {
  write_text(root / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

DatasetWriter::DatasetWriter(fs::path root, const PipelineConfig& cfg, const KinematicChain& chain,
                             const Intrinsics& camera, bool images, const fs::path& chain_file)
    : root_(std::move(root)) {
  manifest_.robot_model_id = chain.name;
  manifest_.images = images;
  manifest_.config_hash = config_hash(cfg);
  manifest_.camera = camera;
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + root_.string() + ": " + ec.message());
  write_text(root_ / "config.json", config_to_json(cfg) + "\n");
  if (!chain_file.empty()) write_text(root_ / "robot_chain.json", read_text(chain_file));
}

void DatasetWriter::add(const DemoResult& result) {
  manifest_.demos.push_back(write_variant(root_, result, manifest_.config_hash, manifest_.images));
}

DatasetManifest DatasetWriter::finish() {
  sort_entries(manifest_.demos);
  write_manifest(root_, manifest_);
  return manifest_;
}

void write_dataset(const fs::path& root, std::span<const DemoResult> results, const DatasetManifest& manifest,
                   const PipelineConfig& cfg, const fs::path& chain_file) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + root.string() + ": " + ec.message());
  write_text(root / "config.json", config_to_json(cfg) + "\n");
  if (!chain_file.empty()) write_text(root / "robot_chain.json", read_text(chain_file));
  DatasetManifest m = manifest;
  m.demos.clear();
  for (const auto& r : results) m.demos.push_back(write_variant(root, r, manifest.config_hash, manifest.images));
  sort_entries(m.demos);
  write_manifest(root, m);
}

DatasetManifest read_manifest(const fs::path& root) {
  const fs::path path = root / "manifest.json";
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "missing manifest " + path.string());
  const json j = parse_json_file(path);
  try {
    return manifest_from(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

Dataset read_dataset(const fs::path& root) {
  Dataset ds;
  ds.root = root;
  ds.manifest = read_manifest(root);
  for (const auto& entry : ds.manifest.demos) {
    VariantData v;
    v.entry = entry;
    const fs::path dir = root / entry.dir;
    const fs::path meta_path = dir / "meta.json";
    const json meta = parse_json_file(meta_path);
    try {
      v.extrinsics.camera_to_robot = matrix_from(meta.at("extrinsics"));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaError, meta_path.string() + ": extrinsics: " + e.what());
    }
    v.actions = read_actions(dir / "actions.jsonl");
    if (v.actions.size() != entry.frame_count) {
      throw Error(ErrorCode::SchemaError, (dir / "actions.jsonl").string() + ": " + std::to_string(v.actions.size()) +
                                              " records, manifest lists " + std::to_string(entry.frame_count));
    }
    if (ds.manifest.images) {
      for (std::size_t i = 0; i < v.actions.size(); ++i) {
        if (v.actions[i].valid && !fs::exists(frame_png(dir, i))) {
          throw Error(ErrorCode::SchemaError, "missing frame " + frame_png(dir, i).string());
        }
      }
    }
    ds.variants.push_back(std::move(v));
  }
  return ds;
}

std::vector<Dataset::SampleRef> Dataset::samples(bool include_invalid) const {
  std::vector<SampleRef> out;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::size_t f = 0; f < variants[v].actions.size(); ++f) {
      if (include_invalid || variants[v].actions[f].valid) out.push_back({v, f});
    }
  }
  return out;
}

fs::path Dataset::image_path(const SampleRef& s) const { return frame_png(root / variants[s.variant].entry.dir, s.frame); }

RgbImage Dataset::load_image(const SampleRef& s) const {
  if (!manifest.images) throw Error(ErrorCode::InvalidArgument, "dataset was written without images");
  if (!variants[s.variant].actions[s.frame].valid) {
    throw Error(ErrorCode::InvalidArgument, "frame " + std::to_string(s.frame) + " is invalid and has no image");
  }
  return read_rgb_png(image_path(s));
}

std::string ValidationReport::to_json() const {
  json v = json::array();
  for (const auto& x : violations) {
    json item = {{"file", x.file}, {"field", x.field}, {"message", x.message}};
    item["frame"] = x.frame ? json(*x.frame) : json(nullptr);
    v.push_back(item);
  }
  json demos = json::array();
  for (const auto& s : summaries) {
    demos.push_back({{"demo_id", s.demo_id},
                     {"variant", s.variant},
                     {"frame_count", s.frame_count},
                     {"valid_count", s.valid_count},
                     {"invalid_rate", s.invalid_rate},
                     {"closed_fraction", s.closed_fraction},
                     {"open_fraction", s.open_fraction},
                     {"bbox", {{"min", vec_json(s.bbox_min)}, {"max", vec_json(s.bbox_max)}}}});
  }
  return json({{"ok", ok()}, {"violations", v}, {"demos", demos}}).dump(2);
}

ValidationReport validate_dataset(const fs::path& root) {
  ValidationReport report;
  const auto violate = [&](const fs::path& file, std::optional<std::size_t> frame, std::string field,
                           std::string message) {
    report.violations.push_back({file.string(), frame, std::move(field), std::move(message)});
  };

  DatasetManifest manifest;
  try {
    manifest = read_manifest(root);
  } catch (const Error& e) {
    violate(root / "manifest.json", std::nullopt, "manifest", e.what());
    return report;
  }

  std::optional<PipelineConfig> cfg;
  const fs::path cfg_path = root / "config.json";
  try {
    std::string text = read_text(cfg_path);
    cfg = config_from_json(text);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    if (fnv1a_hex(text) != manifest.config_hash) {
      violate(cfg_path, std::nullopt, "config_hash", "config.json does not hash to " + manifest.config_hash);
    }
  } catch (const Error& e) {
    violate(cfg_path, std::nullopt, "config", e.what());
  }

  std::optional<KinematicChain> chain;
  const fs::path chain_path = root / "robot_chain.json";
  if (fs::exists(chain_path)) {
    try {
      chain = load_chain(chain_path, false);
    } catch (const Error& e) {
      violate(chain_path, std::nullopt, "robot_chain", e.what());
    }
  }
  const double pos_tol = cfg ? cfg->ik.pos_tol : IkParams{}.pos_tol;
  const double rot_tol = cfg ? cfg->ik.rot_tol : IkParams{}.rot_tol;

  for (const auto& entry : manifest.demos) {
    const fs::path dir = root / entry.dir;
    if (entry.config_hash != manifest.config_hash) {
      violate(root / "manifest.json", std::nullopt, "demos.config_hash", entry.dir + " was produced by another config");
    }
    const fs::path meta_path = dir / "meta.json";
    try {
      const json meta = parse_json_file(meta_path);
      matrix_from(meta.at("extrinsics"));
      const Vec3 shift = vec_from(meta.at("base_shift"), "base_shift");
      if (shift != entry.base_shift) violate(meta_path, std::nullopt, "base_shift", "differs from the manifest");
    } catch (const json::exception& e) {
      violate(meta_path, std::nullopt, "meta", e.what());
    } catch (const Error& e) {
      violate(meta_path, std::nullopt, "meta", e.what());
    }

    const fs::path actions_path = dir / "actions.jsonl";
    std::ifstream in(actions_path);
    if (!in) {
      violate(actions_path, std::nullopt, "actions", "missing file " + actions_path.string());
      continue;
    }
    VariantSummary sum;
    sum.demo_id = entry.demo_id;
    sum.variant = entry.variant;
    std::size_t closed = 0;
    bool have_bbox = false;
    std::optional<double> last_t;
    std::string line;
    std::size_t frame = 0;
    for (; std::getline(in, line); ++frame) {
      ActionRecord r;
      try {
        r = parse_action_record(line);
      } catch (const Error& e) {
        violate(actions_path, frame, "record", e.what());
        continue;
      }
      if (last_t && !(r.t > *last_t)) violate(actions_path, frame, "t", "timestamps not strictly increasing");
      last_t = r.t;
      if (!r.valid) continue;
      ++sum.valid_count;
      bool action_ok = true;
      if (!(r.g >= 0.0 && r.g <= 1.0)) {
        violate(actions_path, frame, "g", "gripper value " + std::to_string(r.g) + " outside [0, 1]");
        action_ok = false;
      }
      if (!r.p.allFinite()) {
        violate(actions_path, frame, "p", "non-finite position");
        action_ok = false;
      }
      RotationMatrix R;
      try {
        R = decode_rot6d(r.r6);
      } catch (const Error& e) {
        violate(actions_path, frame, "r6", e.what());
        action_ok = false;
      }
      if (r.g == 0.0) ++closed;
      if (!have_bbox) {
        sum.bbox_min = sum.bbox_max = r.p;
        have_bbox = true;
      } else {
        sum.bbox_min = sum.bbox_min.cwiseMin(r.p);
        sum.bbox_max = sum.bbox_max.cwiseMax(r.p);
      }
      if (manifest.images) {
        const fs::path png = frame_png(dir, frame);
        if (!fs::exists(png)) {
          violate(png, frame, "frames", "missing frame " + png.string());
        } else {
          try {
            const RgbImage img = read_rgb_png(png);
            if (img.width() != manifest.camera.width || img.height() != manifest.camera.height) {
              violate(png, frame, "frames", "image size differs from the camera");
            }
          } catch (const Error& e) {
            violate(png, frame, "frames", e.what());
          }
        }
      }
      if (chain && action_ok) {
        if (!r.q) {
          violate(actions_path, frame, "q", "valid frame without a joint configuration");
        } else {
          try {
            const RigidTransform ee = forward_kinematics(*chain, *r.q).ee_pose;
            const double dp = (ee.translation() - r.p).norm();
            const double dr = rotation_distance(ee.rotation(), R);
            if (dp > pos_tol || dr > rot_tol) {
              violate(actions_path, frame, "q",
                      "FK pose differs from the action by " + std::to_string(dp) + " m / " + std::to_string(dr) +
                          " rad");
            }
          } catch (const Error& e) {
            violate(actions_path, frame, "q", e.what());
          }
        }
      }
    }
    sum.frame_count = frame;
    if (sum.frame_count != entry.frame_count) {
      violate(actions_path, std::nullopt, "frame_count",
              std::to_string(sum.frame_count) + " records, manifest lists " + std::to_string(entry.frame_count));
    }
    if (sum.valid_count != entry.valid_count) {
      violate(actions_path, std::nullopt, "valid_count",
              std::to_string(sum.valid_count) + " valid records, manifest lists " + std::to_string(entry.valid_count));
    }
    if (sum.frame_count > 0) {
      sum.invalid_rate = static_cast<double>(sum.frame_count - sum.valid_count) / static_cast<double>(sum.frame_count);
    }
    if (sum.valid_count > 0) {
      sum.closed_fraction = static_cast<double>(closed) / static_cast<double>(sum.valid_count);
      sum.open_fraction = 1.0 - sum.closed_fraction;
    }
    report.summaries.push_back(sum);
  }
  return report;
}

}  // namespace demoedit
