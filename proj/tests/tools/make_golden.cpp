// Regenerates tests/data/golden_two_link.png with the scanline oracle.

#include <iostream>

#include "demoedit/image.hpp"
#include "golden_scene.hpp"
#include "scanline_oracle.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_golden <out.png>\n";
    return 2;
  }
  const auto chain = golden::two_link_arm();
  const auto instances =
      demoedit::robot_instances(chain, golden::two_link_pose(), 0.0, golden::golden_extrinsics());
  const auto img = oracle::scanline_render(instances, golden::golden_camera());
  demoedit::write_png(argv[1], img.rgb);
  std::cout << "wrote " << argv[1] << '\n';
  return 0;
}
