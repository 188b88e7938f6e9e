// demoedit: turn recorded pinch-grasp demos into robot demonstration datasets.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "demoedit/dataset.hpp"
#include "demoedit/error.hpp"
#include "demoedit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace demoedit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config;
  std::vector<std::string> demos;
  std::string out;
  std::string demos_root;
  std::string chain;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "Pipeline config (JSON)")->required();
  cmd->add_option("-d,--demo", args.demos, "Demo id or directory; repeatable (default: every demo_* under demos_root)");
  cmd->add_option("-o,--out", args.out, "Output dataset directory (overrides config 'output')");
  cmd->add_option("--demos-root", args.demos_root, "Directory holding demo_<id>/ folders");
  cmd->add_option("--chain", args.chain, "Robot chain JSON (overrides config 'robot_chain')");
  cmd->add_option("-s,--set", args.overrides, "Config override key=value, e.g. icp.trim_distance=0.03");
}

PipelineConfig resolve_config(const CommonArgs& args) {
  PipelineConfig cfg;
  try {
    cfg = load_config(args.config);
  } catch (const Error& e) {
    throw UsageError(std::string("--config ") + args.config + ": " + e.what());
  }
  for (const auto& o : args.overrides) {
    try {
      apply_override(cfg, o);
    } catch (const Error& e) {
      throw UsageError("--set " + o + ": " + e.what());
    }
  }
  if (!args.out.empty()) cfg.output = args.out;
  if (!args.demos_root.empty()) cfg.demos_root = args.demos_root;
  if (!args.chain.empty()) cfg.robot_chain = args.chain;
  if (cfg.robot_chain.empty()) throw UsageError("--chain: no robot chain given (config key 'robot_chain')");
  return cfg;
}

std::vector<fs::path> demo_dirs(const CommonArgs& args, const PipelineConfig& cfg) {
  std::vector<fs::path> dirs;
  if (!args.demos.empty()) {
    for (const auto& d : args.demos) {
      try {
        dirs.push_back(resolve_demo_dir(d, cfg.demos_root));
      } catch (const Error& e) {
        throw UsageError("--demo " + d + ": " + e.what());
      }
    }
    return dirs;
  }
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(cfg.demos_root, ec)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("demo_", 0) == 0 &&
        fs::exists(entry.path() / "meta.json")) {
      dirs.push_back(entry.path());
    }
  }
  if (ec) throw UsageError("--demos-root " + cfg.demos_root.string() + ": " + ec.message());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw UsageError("--demo: no demos found under " + cfg.demos_root.string());
  return dirs;
}

enum class Mode { Actions, Edit, Augment };

int run_pipeline(const CommonArgs& args, Mode mode) {
  PipelineConfig cfg = resolve_config(args);
  if (mode != Mode::Augment) cfg.augmentation.n_variants = 1;
  const auto dirs = demo_dirs(args, cfg);
  const KinematicChain chain = load_chain(cfg.robot_chain, mode != Mode::Actions);

  std::vector<DemoRecord> demos;
  for (const auto& d : dirs) demos.push_back(load_demo(d));
  const Intrinsics camera = demos.front().intrinsics;
  for (const auto& d : demos) {
    if (!(d.intrinsics == camera)) throw Error(ErrorCode::InvalidArgument, "demo " + d.id + " uses another camera");
  }

  ProcessOptions options;
  options.render = mode != Mode::Actions;
  DatasetWriter writer(cfg.output, cfg, chain, camera, options.render, cfg.robot_chain);
  int status = kExitOk;
  for (const auto& demo : demos) {
    ExtractedDemo extracted;
    try {
      extracted = extract_demo(demo, cfg);
    } catch (const Error& e) {
      std::cerr << "demo " << demo.id << ": " << e.what() << '\n';
      status = kExitFailure;
      continue;
    }
    for (const auto& variant : augmentation_variants(demo.id, cfg.augmentation)) {
      try {
        const DemoResult result = finish_variant(demo, extracted, cfg, chain, variant, options);
        writer.add(result);
        std::cout << variant_dir_name(demo.id, variant.index) << ": " << result.valid_count() << "/"
                  << result.samples.size() << " valid\n";
      } catch (const Error& e) {
        std::cerr << variant_dir_name(demo.id, variant.index) << ": " << e.what() << '\n';
        status = kExitFailure;
      }
    }
  }
  writer.finish();
  std::cout << "dataset written to " << cfg.output.string() << '\n';
  return status;
}

int run_validate(const std::string& dataset) {
  const ValidationReport report = validate_dataset(dataset);
  std::cout << report.to_json() << '\n';
  return report.ok() ? kExitOk : kExitFailure;
}

int run_preview(const CommonArgs& args, std::size_t frame, int variant_index, const std::string& png) {
  PipelineConfig cfg = resolve_config(args);
  if (args.demos.size() != 1) throw UsageError("--demo: render-preview takes exactly one demo");
  const DemoRecord demo = load_demo(demo_dirs(args, cfg).front());
  if (frame >= demo.frames.size()) {
    throw UsageError("--frame " + std::to_string(frame) + ": demo has " + std::to_string(demo.frames.size()) +
                     " frames");
  }
  const auto variants = augmentation_variants(demo.id, cfg.augmentation);
  if (variant_index < 0 || variant_index >= static_cast<int>(variants.size())) {
    throw UsageError("--variant " + std::to_string(variant_index) + ": out of range");
  }
  const KinematicChain chain = load_chain(cfg.robot_chain, true);
  const DemoResult result =
      finish_variant(demo, extract_demo(demo, cfg), cfg, chain, variants[static_cast<std::size_t>(variant_index)],
                     ProcessOptions{.render = false});
  const EditedSample& s = result.samples[frame];
  if (!s.valid) {
    std::cerr << "frame " << frame << " is invalid: " << s.failure << '\n';
    return kExitFailure;
  }
  const FrameData data = load_frame(demo.frames[frame], demo.intrinsics);
  write_png(png, edit_frame(data, demo.frames[frame], cfg, chain, s.q, s.action.gripper, demo.intrinsics,
                            result.extrinsics));
  std::cout << "wrote " << png << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert human pinch-grasp RGBD demos into robot demonstration datasets"};
  app.require_subcommand(1);

  CommonArgs actions_args;
  auto* actions = app.add_subcommand("extract-actions", "Extract end-effector actions only (no rendering)");
  add_common(actions, actions_args);

  CommonArgs edit_args;
  auto* edit = app.add_subcommand("edit", "Full pipeline: edited images plus actions");
  add_common(edit, edit_args);

  CommonArgs augment_args;
  auto* augment = app.add_subcommand("augment", "Full pipeline for every robot-base augmentation variant");
  add_common(augment, augment_args);

  std::string dataset;
  auto* validate = app.add_subcommand("validate", "Check a dataset and print a JSON report");
  validate->add_option("dataset", dataset, "Dataset directory")->required();

  CommonArgs preview_args;
  std::size_t frame = 0;
  int variant = 0;
  std::string png;
  auto* preview = app.add_subcommand("render-preview", "Render one edited frame to a PNG");
  add_common(preview, preview_args);
  preview->add_option("--frame", frame, "Frame index")->capture_default_str();
  preview->add_option("--variant", variant, "Augmentation variant")->capture_default_str();
  preview->add_option("--png", png, "Output PNG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    std::cerr << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*actions) return run_pipeline(actions_args, Mode::Actions);
    if (*edit) return run_pipeline(edit_args, Mode::Edit);
    if (*augment) return run_pipeline(augment_args, Mode::Augment);
    if (*validate) return run_validate(dataset);
    if (*preview) return run_preview(preview_args, frame, variant, png);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
