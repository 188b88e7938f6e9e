// Writes a procedurally generated demo, the default robot and a config.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "demoedit/error.hpp"
#include "demoedit/synthetic.hpp"

namespace fs = std::filesystem;
using namespace demoedit;

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic pinch-grasp demo with known ground truth"};
  std::string root = "fixture";
  synthetic::DemoSpec spec;
  app.add_option("-o,--out", root, "Fixture root (demos, robot/ and config.json land here)")->capture_default_str();
  app.add_option("--id", spec.id, "Demo id")->capture_default_str();
  app.add_option("--frames", spec.frames, "Frame count")->capture_default_str();
  app.add_option("--seed", spec.seed, "Trajectory seed")->capture_default_str();
  app.add_option("--corrupt-depth", spec.corrupt_depth_frames, "Frame indices whose depth file is corrupted");
  app.add_flag("--inpainted", spec.write_inpainted, "Also write rgb_inpainted/ frames");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    const fs::path base(root);
    const fs::path chain = synthetic::write_default_chain(base / "robot");
    synthetic::write_demo(base, spec);
    synthetic::write_config(base / "config.json", fs::relative(chain, base), ".", "out");
    std::cout << "wrote " << (base / ("demo_" + spec.id)).string() << '\n';
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
