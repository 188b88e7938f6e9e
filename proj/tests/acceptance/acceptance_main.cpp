// Acceptance checks: one PASS/FAIL line per criterion.
// Usage: demoedit_acceptance <path-to-demoedit-cli>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "demoedit/actions.hpp"
#include "demoedit/compositor.hpp"
#include "demoedit/dataset.hpp"
#include "demoedit/geometry.hpp"
#include "demoedit/registration.hpp"
#include "demoedit/robot.hpp"
#include "demoedit/synthetic.hpp"
#include "fk_oracle.hpp"
#include "inpaint_oracle.hpp"
#include "percentile_oracle.hpp"
#include "random.hpp"

namespace fs = std::filesystem;
using namespace demoedit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

Outcome rotation_codec() {
  const auto t0 = Clock::now();
  oracle::Rng rng(11);
  double max_roundtrip = 0.0;
  double max_ortho = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix3d R = oracle::random_rotation(rng);
    const Eigen::Matrix3d D = decode_rot6d(encode_rot6d(R));
    max_roundtrip = std::max(max_roundtrip, (D - R).cwiseAbs().maxCoeff());
    max_ortho = std::max(max_ortho, (D.transpose() * D - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    max_ortho = std::max(max_ortho, std::abs(D.determinant() - 1.0));
  }
  const double t = seconds_since(t0);
  return {max_roundtrip <= 1e-9 && max_ortho <= 1e-9 && t < 1.0,
          "max round-trip " + fmt("%.2e", max_roundtrip) + ", max orthonormality " + fmt("%.2e", max_ortho) +
              ", " + fmt("%.3f", t) + " s (limits 1e-9, 1e-9, 1 s)"};
}

// Closed, anisotropic and asymmetric blob surface sampled on a Fibonacci sphere.
std::vector<Vec3> blob(int n, double phase) {
  std::vector<Vec3> pts;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double a = golden * i + phase;
    const Vec3 u(r * std::cos(a), r * std::sin(a), z);
    const double radius =
        0.05 * (1.0 + 0.25 * u.x() * u.y() + 0.2 * u.z() * u.z() * u.x() + 0.15 * std::sin(3.0 * u.y() + 1.0) +
                0.3 * std::max(0.0, u.x()) * u.z());
    pts.push_back(radius * Vec3(1.6 * u.x(), u.y(), 0.6 * u.z()));
  }
  return pts;
}

Outcome registration() {
  const auto t0 = Clock::now();
  oracle::Rng rng(23);
  const std::vector<Vec3> source = blob(6000, 0.0);
  IcpParams params;
  params.trim_distance = 0.02;
  params.max_iterations = 300;
  params.convergence_eps = 1e-9;
  int ok = 0;
  int monotone = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double overlap = oracle::uniform(rng, 0.6, 1.0);
    const double sigma = oracle::uniform(rng, 0.0, 0.001);
    std::normal_distribution<double> noise(0.0, sigma);
    const Eigen::Matrix3d R =
        oracle::rotation_about(oracle::random_unit(rng), oracle::uniform(rng, 0.0, 30.0 * M_PI / 180.0));
    const Vec3 t = oracle::random_unit(rng) * oracle::uniform(rng, 0.0, 0.05);
    // target = T*(random subset of source) + noise
    std::vector<Vec3> target;
    for (const auto& p : source) {
      if (oracle::uniform(rng, 0.0, 1.0) >= overlap) continue;
      target.push_back(R * p + t + Vec3(noise(rng), noise(rng), noise(rng)));
    }
    const IcpResult res = icp(source, target, RigidTransform::identity(), params);
    const double dt = (res.transform.translation() - t).norm();
    const double dr = oracle::angle_between(res.transform.rotation(), R);
    if (dt <= 0.003 && dr <= 0.02) ++ok;
    bool mono = true;
    for (std::size_t i = 1; i < res.residual_history.size(); ++i) {
      mono = mono && res.residual_history[i] <= res.residual_history[i - 1] + 1e-12;
    }
    monotone += mono ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {ok >= 95 && monotone == 100 && secs < 30.0,
          std::to_string(ok) + "/100 within 3 mm / 0.02 rad, " + std::to_string(monotone) +
              "/100 monotone residual, " + fmt("%.2f", secs) + " s (limits >= 95, 100, 30 s)"};
}

Eigen::VectorXd random_config(const KinematicChain& chain, oracle::Rng& rng, double margin) {
  Eigen::VectorXd q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    const auto& j = chain.joints[static_cast<std::size_t>(i)];
    q(i) = oracle::uniform(rng, j.lower + margin, j.upper - margin);
  }
  return q;
}

Outcome kinematics() {
  const auto t0 = Clock::now();
  const KinematicChain chain = synthetic::default_chain();
  oracle::Rng rng(31);
  double max_jac = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd q = random_config(chain, rng, 0.0);
    max_jac = std::max(max_jac, (jacobian(chain, q) - oracle::finite_difference_jacobian(chain, q)).cwiseAbs().maxCoeff());
  }
  int ok = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd q_true = random_config(chain, rng, 0.15);
    const Eigen::Matrix4d target = oracle::forward(chain, q_true);
    Eigen::VectorXd seed = q_true;
    for (int k = 0; k < seed.size(); ++k) seed(k) += oracle::uniform(rng, -0.1, 0.1);
    const IkResult res = inverse_kinematics(
        chain, RigidTransform(target.block<3, 3>(0, 0), target.block<3, 1>(0, 3)), chain.clamp(seed), IkParams{});
    const Eigen::Matrix4d reached = oracle::forward(chain, res.q);
    const double dp = (reached.block<3, 1>(0, 3) - target.block<3, 1>(0, 3)).norm();
    const double dr = oracle::angle_between(reached.block<3, 3>(0, 0), target.block<3, 3>(0, 0));
    if (dp <= 1e-3 && dr <= 0.5 * M_PI / 180.0) ++ok;
  }
  const double secs = seconds_since(t0);
  return {max_jac <= 1e-5 && ok >= 196 && secs < 30.0,
          "Jacobian max |J - J_fd| " + fmt("%.2e", max_jac) + ", IK " + std::to_string(ok) +
              "/200 within 1 mm / 0.5 deg, " + fmt("%.2f", secs) + " s (limits 1e-5, >= 196, 30 s)"};
}

Outcome gripper_rule() {
  oracle::Rng rng(41);
  int mismatches = 0;
  int trials = 0;
  for (; trials < 500; ++trials) {
    const int n = 1 + static_cast<int>(rng() % 300);
    Trajectory traj;
    std::vector<double> d;
    std::vector<bool> valid;
    for (int i = 0; i < n; ++i) {
      TrajectoryFrame f;
      f.timestamp = i * 0.1;
      // Coarse quantization produces ties.
      f.raw_distance = (trials % 2 == 0) ? std::round(oracle::uniform(rng, 0.0, 0.1) * 200.0) / 200.0
                                         : oracle::uniform(rng, 0.0, 0.1);
      f.valid = oracle::uniform(rng, 0.0, 1.0) > 0.1;
      f.action.gripper = std::min(1.0, f.raw_distance / 0.08);
      d.push_back(f.raw_distance);
      valid.push_back(f.valid);
      traj.frames.push_back(f);
    }
    const Trajectory out = postprocess_gripper(traj, GripperCalibration{});
    const auto expect = oracle::closed_frames(d, valid, 20);
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double want = expect[k] ? 0.0 : traj.frames[k].action.gripper;
      if (out.frames[k].action.gripper != want) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(trials) + " random trajectories, " + std::to_string(mismatches) +
                               " frames differ from the sort oracle (limit 0)"};
}

Outcome compositing() {
  const KinematicChain chain = synthetic::default_chain();
  oracle::Rng rng(53);
  Intrinsics k{300.0, 300.0, 159.5, 119.5, 320, 240};
  const Extrinsics e{RigidTransform(
      [] {
        const Vec3 z = (Vec3(0.4, 0.0, 0.3) - Vec3(1.4, 0.2, 0.7)).normalized();
        const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
        RotationMatrix R;
        R << x, z.cross(x), z;
        return R;
      }(),
      Vec3(1.4, 0.2, 0.7))};
  long violations = 0;
  long drawn = 0;
  bool deterministic = true;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_config(chain, rng, 0.2);
    const double g = oracle::uniform(rng, 0.0, 1.0);
    const RenderLayer a = render_robot(chain, q, g, k, e);
    const RenderLayer b = render_robot(chain, q, g, k, e);
    deterministic = deterministic && a.rgb == b.rgb && a.coverage == b.coverage &&
                    std::memcmp(a.depth.data().data(), b.depth.data().data(), a.depth.data().size() * sizeof(double)) == 0;
    // Scene: tilted plane through the robot's depth range, with holes.
    DepthImage scene(k.width, k.height);
    RgbImage scene_rgb(k.width, k.height);
    const double base = oracle::uniform(rng, 0.8, 1.6);
    const double gx = oracle::uniform(rng, -0.003, 0.003);
    const double gy = oracle::uniform(rng, -0.003, 0.003);
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        scene_rgb.at(x, y, 0) = 255;
        scene_rgb.at(x, y, 2) = 255;
        if (oracle::uniform(rng, 0.0, 1.0) < 0.05) continue;
        const double m = base + gx * (x - 160) + gy * (y - 120) + oracle::uniform(rng, -0.01, 0.01);
        scene.at(x, y) = static_cast<std::uint16_t>(std::clamp(std::lround(m * 1000.0), 1L, 65535L));
      }
    }
    const double eps = 0.005;
    const RgbImage out = composite(scene_rgb, scene, a, eps);
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        const bool robot_drawn = out.at(x, y, 1) != 0 || out.at(x, y, 0) != 255 || out.at(x, y, 2) != 255;
        if (!robot_drawn) continue;
        ++drawn;
        const std::uint16_t sd = scene.at(x, y);
        if (sd != 0 && a.depth.at(x, y) >= sd * 1e-3 + eps) ++violations;
      }
    }
  }
  return {violations == 0 && deterministic && drawn > 0,
          std::to_string(violations) + " occlusion violations over " + std::to_string(drawn) +
              " drawn robot pixels, renderer " + (deterministic ? "bit-deterministic" : "NOT deterministic")};
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct Fixture {
  fs::path root;
  fs::path config;
  synthetic::GroundTruth gt;
};

Fixture make_fixture(const fs::path& root) {
  Fixture f;
  f.root = root;
  fs::create_directories(root);
  const fs::path chain = synthetic::write_default_chain(root / "robot");
  synthetic::DemoSpec spec;
  spec.id = "d1";
  spec.frames = 100;
  f.gt = synthetic::write_demo(root, spec);
  f.config = root / "config.json";
  synthetic::write_config(f.config, chain, root, root / "out");
  return f;
}

Outcome end_to_end(const std::string& cli, const Fixture& fx) {
  const auto t0 = Clock::now();
  const fs::path out = fx.root / "out_edit";
  const int rc = run(cli + " edit --config " + fx.config.string() + " --demo d1 --out " + out.string());
  const double secs = seconds_since(t0);
  if (rc != 0) return {false, "edit exited with " + std::to_string(rc)};
  const Dataset ds = read_dataset(out);
  int ok = 0;
  double worst_p = 0.0;
  double worst_r = 0.0;
  const auto& actions = ds.variants.at(0).actions;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    if (!a.valid) continue;
    const double dp = (a.p - fx.gt.gripper_poses[i].translation()).norm();
    const double dr = oracle::angle_between(decode_rot6d(a.r6), fx.gt.gripper_poses[i].rotation());
    worst_p = std::max(worst_p, dp);
    worst_r = std::max(worst_r, dr);
    if (dp <= 1e-3 && dr <= 0.01) ++ok;
  }
  return {ok >= 95 && actions.size() == 100 && secs < 120.0,
          std::to_string(ok) + "/100 frames within 1e-3 m / 0.01 rad (worst " + fmt("%.2e", worst_p) + " m, " +
              fmt("%.2e", worst_r) + " rad), " + fmt("%.1f", secs) + " s (limits >= 95, 120 s)"};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file() ? 1 : 0;
  if (count_b != files.size()) {
    diff = "file counts differ";
    return false;
  }
  for (const auto& rel : files) {
    std::ifstream fa(a / rel, std::ios::binary), fb(b / rel, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      diff = rel.string();
      return false;
    }
  }
  return true;
}

Outcome augmentation(const std::string& cli, const Fixture& fx) {
  const std::string base = cli + " augment --config " + fx.config.string() +
                           " --demo d1 --set augmentation.n_variants=5 --set augmentation.max_shift_x=0.2"
                           " --set augmentation.rng_seed=7 --out ";
  const fs::path out1 = fx.root / "out_aug1";
  const fs::path out2 = fx.root / "out_aug2";
  const int rc1 = run(base + out1.string());
  const int rc2 = run(base + out2.string());
  if (rc1 != 0 || rc2 != 0) return {false, "augment exited with " + std::to_string(rc1) + "/" + std::to_string(rc2)};
  const Dataset ds = read_dataset(out1);
  bool ok = ds.variants.size() == 5;
  std::string why = ok ? "" : "expected 5 variants, got " + std::to_string(ds.variants.size());
  long checked = 0;
  long mismatched = 0;
  double max_shift = 0.0;
  if (ok) {
    const auto& v0 = ds.variants[0];
    ok = v0.entry.variant == 0 && v0.entry.base_shift == Vec3::Zero();
    if (!ok) why = "variant 0 is shifted";
    for (const auto& v : ds.variants) {
      const Vec3 s = v.entry.base_shift;
      max_shift = std::max(max_shift, std::abs(s.x()));
      if (std::abs(s.x()) > 0.2 || s.y() != 0.0 || s.z() != 0.0) {
        ok = false;
        why = "shift outside +-0.20 m along x";
      }
      for (std::size_t i = 0; i < v.actions.size(); ++i) {
        const auto& a = v.actions[i];
        const auto& a0 = v0.actions[i];
        if (a.p == Vec3::Zero() || a0.p == Vec3::Zero()) continue;  // no action extracted
        ++checked;
        if (!(a.p == a0.p - s) || !(a.r6 == a0.r6) || a.g != a0.g) ++mismatched;
      }
    }
  }
  std::string diff;
  const bool identical = same_tree(out1, out2, diff);
  ok = ok && mismatched == 0 && checked > 0 && identical;
  return {ok, (why.empty() ? "" : why + "; ") + std::to_string(ds.variants.size()) + " variants, max |shift| " +
                  fmt("%.3f", max_shift) + " m, " + std::to_string(mismatched) + "/" + std::to_string(checked) +
                  " positions differ from p0 - s, reruns " + (identical ? "bit-identical" : "differ at " + diff)};
}

Outcome inpainting() {
  oracle::Rng rng(61);
  bool constant_ok = true;
  bool outside_ok = true;
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 20 + static_cast<int>(rng() % 40);
    const int h = 20 + static_cast<int>(rng() % 40);
    RgbImage img(w, h);
    const std::uint8_t c[3] = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    RgbImage tex(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < 3; ++k) {
          img.at(x, y, k) = c[k];
          tex.at(x, y, k) = static_cast<std::uint8_t>(rng());
        }
      }
    }
    Mask m(w, h);
    for (int blobs = 0; blobs < 3; ++blobs) {
      const int cx = static_cast<int>(rng() % static_cast<unsigned>(w));
      const int cy = static_cast<int>(rng() % static_cast<unsigned>(h));
      const int r = 2 + static_cast<int>(rng() % 6);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.at(x, y) = 255;
        }
      }
    }
    constant_ok = constant_ok && inpaint_fmm(img, m, 3) == img;
    const RgbImage filled = inpaint_fmm(tex, m, 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.at(x, y) != 0) continue;
        for (int k = 0; k < 3; ++k) outside_ok = outside_ok && filled.at(x, y, k) == tex.at(x, y, k);
      }
    }
  }
  // 32x32 instance: smooth ramp with a 7-column masked strip.
  RgbImage img(32, 32);
  Mask strip(32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(20 + 4 * x + 2 * y);
      img.at(x, y, 1) = static_cast<std::uint8_t>(200 - 3 * x + y);
      img.at(x, y, 2) = static_cast<std::uint8_t>(std::lround(120 + 20 * std::sin(y / 3.0) + x));
      if (x >= 12 && x <= 18) strip.at(x, y) = 255;
    }
  }
  const RgbImage got = inpaint_fmm(img, strip, 3);
  const RgbImage want = oracle::fill_strip(img, 12, 18, 3);
  int max_diff = 0;
  for (std::size_t i = 0; i < got.data().size(); ++i) {
    max_diff = std::max(max_diff, std::abs(static_cast<int>(got.data()[i]) - static_cast<int>(want.data()[i])));
  }
  return {constant_ok && outside_ok && max_diff <= 2,
          std::string("constant images ") + (constant_ok ? "unchanged" : "CHANGED") + ", outside-mask pixels " +
              (outside_ok ? "unchanged" : "CHANGED") + ", 32x32 strip max |diff| vs oracle " +
              std::to_string(max_diff) + " (limit 2)"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: demoedit_acceptance <demoedit-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = fs::temp_directory_path() / ("demoedit_acceptance_" + std::to_string(::getpid()));

  int failures = 0;
  const auto report = [&](const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += o.pass ? 0 : 1;
  };

  report("rotation-codec", rotation_codec);
  report("registration", registration);
  report("kinematics", kinematics);
  report("gripper-rule", gripper_rule);
  report("compositing", compositing);
  std::optional<Fixture> fx;
  try {
    fx = make_fixture(work);
  } catch (const std::exception& e) {
    std::cout << "fixture generation failed: " << e.what() << '\n';
  }
  report("end-to-end", [&] { return fx ? end_to_end(cli, *fx) : Outcome{false, "no fixture"}; });
  report("augmentation", [&] { return fx ? augmentation(cli, *fx) : Outcome{false, "no fixture"}; });
  report("inpainting", inpainting);

  std::error_code ec;
  fs::remove_all(work, ec);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
