#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demoedit/pipeline.hpp"

namespace demoedit {

inline constexpr int kDatasetFormatVersion = 1;

/// One line of actions.jsonl: {t, p:[x,y,z], r6:[6], g, valid, q?}.
struct ActionRecord {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Rotation6D r6;
  double g = 0.0;
  bool valid = false;
  std::optional<JointConfig> q;  // IK solution behind the overlay
};

std::string to_jsonl_line(const ActionRecord& r);
/// Throws SchemaError naming the missing or malformed field.
ActionRecord parse_action_record(std::string_view line);

struct ManifestEntry {
  std::string demo_id;
  int variant = 0;
  std::string dir;  // relative to the dataset root
  std::size_t frame_count = 0;
  std::size_t valid_count = 0;
  Vec3 base_shift = Vec3::Zero();
  std::string config_hash;
};

struct DatasetManifest {
  int format_version = kDatasetFormatVersion;
  std::string robot_model_id;
  bool images = true;
  std::string config_hash;
  Intrinsics camera;
  std::vector<ManifestEntry> demos;  // sorted by (demo_id, variant)
};

std::string variant_dir_name(const std::string& demo_id, int variant);

DatasetManifest make_manifest(std::span<const DemoResult> results, const PipelineConfig& cfg,
                              const KinematicChain& chain, const Intrinsics& camera, bool images);

/// Writes manifest.json, config.json, robot_chain.json (copied from
/// `chain_file` when given) and one demo_<id>_v<k>/ directory per result.
void write_dataset(const std::filesystem::path& root, std::span<const DemoResult> results,
                   const DatasetManifest& manifest, const PipelineConfig& cfg,
                   const std::filesystem::path& chain_file = {});

/// Incremental form of write_dataset: variants are written as they are added
/// so their images need not stay in memory.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path root, const PipelineConfig& cfg, const KinematicChain& chain,
                const Intrinsics& camera, bool images, const std::filesystem::path& chain_file = {});
  void add(const DemoResult& result);
  /// Writes manifest.json and returns it.
  DatasetManifest finish();

 private:
  std::filesystem::path root_;
  DatasetManifest manifest_;
};

/// Writes one variant directory and returns its manifest entry.
ManifestEntry write_variant(const std::filesystem::path& root, const DemoResult& result,
                            const std::string& config_hash, bool images);
void write_manifest(const std::filesystem::path& root, const DatasetManifest& manifest);

struct VariantData {
  ManifestEntry entry;
  Extrinsics extrinsics;
  std::vector<ActionRecord> actions;
};

struct Dataset {
  std::filesystem::path root;
  DatasetManifest manifest;
  std::vector<VariantData> variants;

  struct SampleRef {
    std::size_t variant;
    std::size_t frame;
  };
  /// Samples in (demo, variant, frame) order.
  std::vector<SampleRef> samples(bool include_invalid = false) const;
  std::filesystem::path image_path(const SampleRef& s) const;
  RgbImage load_image(const SampleRef& s) const;
};

/// Throws IoError / SchemaError with file and field diagnostics.
DatasetManifest read_manifest(const std::filesystem::path& root);
Dataset read_dataset(const std::filesystem::path& root);

struct Violation {
  std::string file;
  std::optional<std::size_t> frame;
  std::string field;
  std::string message;
};

struct VariantSummary {
  std::string demo_id;
  int variant = 0;
  std::size_t frame_count = 0;
  std::size_t valid_count = 0;
  double invalid_rate = 0.0;
  double closed_fraction = 0.0;  // g == 0 among valid frames
  double open_fraction = 0.0;
  Vec3 bbox_min = Vec3::Zero();  // over valid positions
  Vec3 bbox_max = Vec3::Zero();
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<VariantSummary> summaries;
  bool ok() const { return violations.empty(); }
  std::string to_json() const;
};

/// Checks manifest integrity, config hash, action invariants, image sizes,
/// timestamp order and, when the chain is available, that FK of each stored
/// joint configuration reproduces its action pose within IK tolerances.
ValidationReport validate_dataset(const std::filesystem::path& root);

}  // namespace demoedit
