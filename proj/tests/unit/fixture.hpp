#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "demoedit/config.hpp"
#include "demoedit/dataset.hpp"
#include "demoedit/pipeline.hpp"
#include "demoedit/synthetic.hpp"

namespace fixture {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("demoedit_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

/// Small demo with the default robot: 320 x 240, focal 300.
inline demoedit::synthetic::DemoSpec small_spec(int frames = 20) {
  demoedit::synthetic::DemoSpec spec;
  spec.frames = frames;
  spec.width = 320;
  spec.height = 240;
  spec.focal = 300.0;
  return spec;
}

struct Demo {
  fs::path chain_file;
  fs::path config_file;
  demoedit::synthetic::GroundTruth gt;
  demoedit::DemoRecord record;
  demoedit::KinematicChain chain;
  demoedit::PipelineConfig config;
};

inline Demo make_demo(const fs::path& root, const demoedit::synthetic::DemoSpec& spec) {
  using namespace demoedit;
  Demo d;
  d.chain_file = synthetic::write_default_chain(root / "robot");
  d.gt = synthetic::write_demo(root, spec);
  d.config_file = root / "config.json";
  synthetic::write_config(d.config_file, d.chain_file, root, root / "out");
  d.record = load_demo(root / ("demo_" + spec.id));
  d.chain = load_chain(d.chain_file);
  d.config = load_config(d.config_file);
  return d;
}

/// Runs the full pipeline for every variant and writes a dataset at `out`.
inline void write_dataset_for(const Demo& d, const fs::path& out, const demoedit::PipelineConfig& cfg) {
  using namespace demoedit;
  DatasetWriter writer(out, cfg, d.chain, d.record.intrinsics, true, d.chain_file);
  const ExtractedDemo ex = extract_demo(d.record, cfg);
  for (const auto& v : augmentation_variants(d.record.id, cfg.augmentation)) {
    writer.add(finish_variant(d.record, ex, cfg, d.chain, v));
  }
  writer.finish();
}

}  // namespace fixture
