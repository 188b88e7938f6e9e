#include "demoedit/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "demoedit/compositor.hpp"
#include "demoedit/error.hpp"
#include "demoedit/pipeline.hpp"

namespace demoedit::synthetic {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct JointDef {
  Vec3 xyz;
  Vec3 rpy;
  double lower;
  double upper;
};

constexpr double kHalfPi = M_PI / 2.0;

const std::array<JointDef, 7> kJoints{{
    {{0.0, 0.0, 0.333}, {0.0, 0.0, 0.0}, -2.8973, 2.8973},
    {{0.0, 0.0, 0.0}, {-kHalfPi, 0.0, 0.0}, -1.7628, 1.7628},
    {{0.0, -0.316, 0.0}, {kHalfPi, 0.0, 0.0}, -2.8973, 2.8973},
    {{0.0825, 0.0, 0.0}, {kHalfPi, 0.0, 0.0}, -3.0718, -0.0698},
    {{-0.0825, 0.384, 0.0}, {-kHalfPi, 0.0, 0.0}, -2.8973, 2.8973},
    {{0.0, 0.0, 0.0}, {kHalfPi, 0.0, 0.0}, -0.0175, 3.7525},
    {{0.088, 0.0, 0.0}, {kHalfPi, 0.0, 0.0}, -2.8973, 2.8973},
}};
constexpr double kFlange = 0.107;
constexpr double kFingerReach = 0.1034;
const std::array<double, 7> kHome{0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785};

constexpr Color kLinkColor{235, 235, 230};
constexpr Color kBaseColor{190, 190, 195};
constexpr Color kGripperColor{45, 45, 50};
constexpr Color kSkinColor{224, 172, 140};
constexpr Color kTableColor{150, 115, 80};
constexpr Color kWallColor{200, 205, 210};
constexpr Color kBoxColor{70, 120, 190};

TriangleMesh cylinder_between(const Vec3& a, const Vec3& b, double radius) {
  const Vec3 d = b - a;
  const double len = d.norm();
  const RotationMatrix R = Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), d / len).toRotationMatrix();
  return transformed(make_cylinder(radius, 0.0, len, 20), RigidTransform(R, a));
}

TriangleMesh link_mesh(std::size_t i) {
  const Vec3 next = i + 1 < kJoints.size() ? kJoints[i + 1].xyz : Vec3(0.0, 0.0, kFlange);
  const double radius = i < 4 ? 0.06 : 0.045;
  TriangleMesh m = make_cylinder(radius, -0.055, 0.055, 20);  // joint housing along the axis
  if (next.norm() > 1e-9) append(m, cylinder_between(Vec3::Zero(), next, radius * 0.85));
  m.color = kLinkColor;
  return m;
}

TriangleMesh base_mesh() {
  TriangleMesh m = make_cylinder(0.08, 0.0, 0.28, 24);
  m.color = kBaseColor;
  return m;
}

TriangleMesh hand_mesh() {
  TriangleMesh m = transformed(make_box(Vec3(0.06, 0.2, 0.058)), RigidTransform::from_translation(Vec3(0.0, 0.0, -0.0745)));
  append(m, cylinder_between(Vec3(0.0, 0.0, -kFingerReach), Vec3(0.0, 0.0, -0.145), 0.04));
  m.color = kGripperColor;
  return m;
}

TriangleMesh finger_mesh() {
  TriangleMesh m = transformed(make_box(Vec3(0.02, 0.018, 0.05)), RigidTransform::from_translation(Vec3(0.0, 0.009, -0.025)));
  m.color = kGripperColor;
  return m;
}

RigidTransform ee_offset() { return {rpy(0.0, 0.0, -M_PI / 4.0), Vec3(0.0, 0.0, kFlange + kFingerReach)}; }

json color_json(const Color& c) { return json::array({c[0], c[1], c[2]}); }

// Trajectory phases and estimator-error phases drawn from the seed.
struct Phases {
  std::array<double, 8> v{};
};

Phases phases_for(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Phases p;
  for (auto& x : p.v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * M_PI;
  return p;
}

double smoothstep(double a, double b, double t) {
  const double x = std::clamp((t - a) / (b - a), 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

double width_profile(double tau) {
  constexpr double kOpen = 0.075;
  constexpr double kClosed = 0.005;
  constexpr double kReopen = 0.07;
  if (tau < 0.45) return kOpen + (kClosed - kOpen) * smoothstep(0.25, 0.45, tau);
  if (tau < 0.7) return kClosed;
  return kClosed + (kReopen - kClosed) * smoothstep(0.7, 0.85, tau);
}

Intrinsics intrinsics_for(const DemoSpec& spec) {
  Intrinsics k;
  k.fx = k.fy = spec.focal;
  k.cx = (spec.width - 1) / 2.0;
  k.cy = (spec.height - 1) / 2.0;
  k.width = spec.width;
  k.height = spec.height;
  return k;
}

Extrinsics camera_extrinsics() {
  const Vec3 eye(1.0, 0.05, 0.62);
  const Vec3 target(0.45, 0.0, 0.2);
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
  const Vec3 y = z.cross(x);
  RotationMatrix R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return {RigidTransform(R, eye)};
}

struct Scenery {
  TriangleMesh table;
  TriangleMesh wall;
  TriangleMesh box;
  TriangleMesh hand;
};

Scenery make_scenery() {
  Scenery s;
  s.table = transformed(make_box(Vec3(2.4, 2.4, 0.02)), RigidTransform::from_translation(Vec3(0.4, 0.0, -0.01)));
  s.table.color = kTableColor;
  s.wall = transformed(make_box(Vec3(0.02, 3.0, 2.0)), RigidTransform::from_translation(Vec3(-0.35, 0.0, 0.9)));
  s.wall.color = kWallColor;
  s.box = transformed(make_box(Vec3(0.08, 0.08, 0.1)), RigidTransform::from_translation(Vec3(0.62, 0.2, 0.05)));
  s.box.color = kBoxColor;
  s.hand = hand_surface_mesh(48, 72);
  return s;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json matrix_json(const RigidTransform& t) {
  const Eigen::Matrix4d m = t.matrix();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  return rows;
}

}  // namespace

KinematicChain default_chain() {
  KinematicChain chain;
  chain.name = "panda_like_7dof";
  chain.base_mesh = base_mesh();
  for (std::size_t i = 0; i < kJoints.size(); ++i) {
    Joint j;
    j.name = "joint" + std::to_string(i + 1);
    j.origin = RigidTransform(rpy(kJoints[i].rpy.x(), kJoints[i].rpy.y(), kJoints[i].rpy.z()), kJoints[i].xyz);
    j.axis = Vec3::UnitZ();
    j.lower = kJoints[i].lower;
    j.upper = kJoints[i].upper;
    j.mesh = link_mesh(i);
    chain.joints.push_back(std::move(j));
  }
  chain.ee_offset = ee_offset();
  chain.gripper.max_travel = 0.04;
  chain.gripper.hand_mesh = hand_mesh();
  chain.gripper.finger_mesh = finger_mesh();
  chain.home = Eigen::Map<const JointConfig>(kHome.data(), 7);
  return chain;
}

fs::path write_default_chain(const fs::path& dir) {
  fs::create_directories(dir);
  write_stl(dir / "base.stl", base_mesh());
  json joints = json::array();
  for (std::size_t i = 0; i < kJoints.size(); ++i) {
    const std::string mesh = "link" + std::to_string(i + 1) + ".stl";
    write_stl(dir / mesh, link_mesh(i));
    joints.push_back({{"name", "joint" + std::to_string(i + 1)},
                      {"origin_xyz", {kJoints[i].xyz.x(), kJoints[i].xyz.y(), kJoints[i].xyz.z()}},
                      {"origin_rpy", {kJoints[i].rpy.x(), kJoints[i].rpy.y(), kJoints[i].rpy.z()}},
                      {"axis", {0, 0, 1}},
                      {"limits", {kJoints[i].lower, kJoints[i].upper}},
                      {"mesh", mesh},
                      {"color", color_json(kLinkColor)}});
  }
  write_stl(dir / "hand.stl", hand_mesh());
  write_stl(dir / "finger.stl", finger_mesh());
  const json j = {{"name", "panda_like_7dof"},
                  {"base", {{"mesh", "base.stl"}, {"color", color_json(kBaseColor)}}},
                  {"joints", joints},
                  {"ee_offset", {{"xyz", {0.0, 0.0, kFlange + kFingerReach}}, {"rpy", {0.0, 0.0, -M_PI / 4.0}}}},
                  {"gripper",
                   {{"max_travel", 0.04},
                    {"hand_mesh", "hand.stl"},
                    {"finger_mesh", "finger.stl"},
                    {"color", color_json(kGripperColor)}}},
                  {"home", kHome}};
  const fs::path path = dir / "robot.json";
  write_json(path, j);
  return path;
}

HandKeypoints hand_keypoints_local(double width) {
  constexpr double s = 0.03;   // thumb bone length along z
  constexpr double b = 0.003;  // thumb zigzag
  HandKeypoints kp;
  const std::array<double, 4> zig{1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    kp[landmark::kThumb[static_cast<std::size_t>(i)]] =
        Vec3(0.0, -width / 2.0 - b + b * zig[static_cast<std::size_t>(i)], -s * (3 - i));
  }
  const std::array<double, 4> phi{0.3, 0.0, -0.4, -0.8};
  const std::array<double, 4> len{0.09, 0.045, 0.025, 0.02};
  std::array<Vec3, 5> chain;
  chain[0] = Vec3::Zero();
  for (std::size_t i = 0; i < 4; ++i) chain[i + 1] = chain[i] + len[i] * Vec3(0.0, std::sin(phi[i]), std::cos(phi[i]));
  const Vec3 shift = Vec3(0.0, width / 2.0, 0.0) - chain[4];
  kp[landmark::kWrist] = chain[0] + shift;
  for (std::size_t i = 0; i < 4; ++i) kp[landmark::kIndex[i]] = chain[i + 1] + shift;
  for (int f = 1; f <= 3; ++f) {
    const Vec3 offset(-0.008 * f, 0.018 * f, -0.006 * f);
    for (int i = 0; i < 4; ++i) kp[5 + 4 * f + i] = kp[landmark::kIndex[static_cast<std::size_t>(i)]] + offset;
  }
  return kp;
}

double hand_surface_height(double y, double z) {
  const auto bump = [](double y, double z, double cy, double cz, double sigma) {
    const double r2 = (y - cy) * (y - cy) + (z - cz) * (z - cz);
    return std::exp(-r2 / (2.0 * sigma * sigma));
  };
  return 0.012 * bump(y, z, 0.02, -0.05, 0.02) + 0.008 * bump(y, z, -0.03, -0.12, 0.025) -
         0.006 * bump(y, z, 0.035, -0.13, 0.015) + 0.004 * (y / 0.06) * (z + 0.08) / 0.09;
}

namespace {
constexpr double kSheetY0 = -0.06;
constexpr double kSheetY1 = 0.06;
constexpr double kSheetZ0 = -0.17;
constexpr double kSheetZ1 = 0.015;
}  // namespace

TriangleMesh hand_surface_mesh(int ny, int nz) {
  TriangleMesh m;
  for (int j = 0; j <= nz; ++j) {
    for (int i = 0; i <= ny; ++i) {
      const double y = kSheetY0 + (kSheetY1 - kSheetY0) * i / ny;
      const double z = kSheetZ0 + (kSheetZ1 - kSheetZ0) * j / nz;
      m.vertices.emplace_back(hand_surface_height(y, z), y, z);
    }
  }
  const auto id = [ny](int i, int j) { return j * (ny + 1) + i; };
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < ny; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  m.color = kSkinColor;
  return m;
}

std::vector<Vec3> hand_vertices_local() {
  constexpr int ny = 22;
  constexpr int nz = 33;  // 23 x 34 = 782 grid points; the first 778 are kept
  std::vector<Vec3> v;
  for (int j = 0; j <= nz; ++j) {
    for (int i = 0; i <= ny; ++i) {
      if (static_cast<int>(v.size()) == kHandMeshVertexCount) return v;
      const double y = kSheetY0 + (kSheetY1 - kSheetY0) * i / ny;
      const double z = kSheetZ0 + (kSheetZ1 - kSheetZ0) * j / nz;
      v.emplace_back(hand_surface_height(y, z), y, z);
    }
  }
  return v;
}

GroundTruth ground_truth(const DemoSpec& spec) {
  if (spec.frames < 2) throw Error(ErrorCode::InvalidArgument, "synthetic demo needs at least 2 frames");
  GroundTruth gt;
  gt.intrinsics = intrinsics_for(spec);
  gt.extrinsics = camera_extrinsics();
  const Phases ph = phases_for(spec.seed);
  const RigidTransform robot_to_camera = invert(gt.extrinsics.camera_to_robot);
  RotationMatrix R0;
  R0.col(0) = Vec3::UnitX();
  R0.col(1) = -Vec3::UnitY();
  R0.col(2) = -Vec3::UnitZ();
  const Vec3 err_axis = Vec3(0.3, 1.0, 0.2).normalized();
  for (int i = 0; i < spec.frames; ++i) {
    const double tau = static_cast<double>(i) / (spec.frames - 1);
    const double w = 2.0 * M_PI * tau;
    gt.timestamps.push_back(i / 30.0);
    const Vec3 p(0.45 + 0.05 * std::sin(w + ph.v[0]), -0.08 + 0.16 * tau + 0.02 * std::sin(w + ph.v[1]),
                 0.24 - 0.07 * std::sin(M_PI * tau) + 0.01 * std::sin(w + ph.v[2]));
    const RotationMatrix R =
        R0 * rpy(0.15 * std::sin(w + ph.v[3]), 0.12 * std::sin(w + ph.v[4]), 0.25 * std::sin(w + ph.v[5]));
    const RigidTransform pose(R, p);
    gt.gripper_poses.push_back(pose);
    const double width = width_profile(tau);
    gt.fingertip_distance.push_back(width);
    gt.keypoints.push_back(transform(robot_to_camera * pose, hand_keypoints_local(width)));
    const Vec3 et = spec.error_translation * Vec3(0.6 * std::sin(w + ph.v[6]), 0.5 * std::cos(1.3 * w + ph.v[7]),
                                                  0.6 * std::sin(M_PI * tau + 0.5));
    const RotationMatrix er = axis_angle(err_axis, spec.error_rotation * std::sin(w + ph.v[6] + 1.0));
    gt.estimator_error.push_back(RigidTransform(er, et));
  }
  return gt;
}

GroundTruth write_demo(const fs::path& root, const DemoSpec& spec) {
  const GroundTruth gt = ground_truth(spec);
  const fs::path dir = root / ("demo_" + spec.id);
  for (const char* sub : {"rgb", "depth", "mask", "keypoints", "verts"}) fs::create_directories(dir / sub);
  if (spec.write_inpainted) fs::create_directories(dir / "rgb_inpainted");

  write_json(dir / "meta.json", {{"id", spec.id},
                                 {"intrinsics",
                                  {{"fx", gt.intrinsics.fx},
                                   {"fy", gt.intrinsics.fy},
                                   {"cx", gt.intrinsics.cx},
                                   {"cy", gt.intrinsics.cy},
                                   {"width", gt.intrinsics.width},
                                   {"height", gt.intrinsics.height}}},
                                 {"extrinsics", matrix_json(gt.extrinsics.camera_to_robot)},
                                 {"timestamps", gt.timestamps}});

  const Scenery scene = make_scenery();
  const RigidTransform robot_to_camera = invert(gt.extrinsics.camera_to_robot);
  const std::vector<Vec3> verts_local = hand_vertices_local();
  const Intrinsics& k = gt.intrinsics;

  for (int i = 0; i < spec.frames; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const RigidTransform hand_to_camera = robot_to_camera * gt.gripper_poses[idx];
    std::vector<MeshInstance> background{{&scene.table, robot_to_camera},
                                         {&scene.wall, robot_to_camera},
                                         {&scene.box, robot_to_camera}};
    std::vector<MeshInstance> all = background;
    all.push_back({&scene.hand, hand_to_camera});
    const RenderLayer full = rasterize(all, k);
    const MeshInstance hand_only[] = {{&scene.hand, hand_to_camera}};
    const RenderLayer hand = rasterize(hand_only, k);

    DepthImage depth(k.width, k.height);
    Mask mask(k.width, k.height);
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) {
        const double d = full.depth.at(x, y);
        if (std::isfinite(d)) depth.at(x, y) = static_cast<std::uint16_t>(std::lround(d * 1000.0));
        if (hand.coverage.at(x, y) != 0 && hand.depth.at(x, y) == d) mask.at(x, y) = 255;
      }
    }
    write_png(frame_file(dir / "rgb", idx, ".png"), full.rgb);
    if (std::find(spec.corrupt_depth_frames.begin(), spec.corrupt_depth_frames.end(), i) !=
        spec.corrupt_depth_frames.end()) {
      std::ofstream(frame_file(dir / "depth", idx, ".png")) << "not a png\n";
    } else {
      write_png(frame_file(dir / "depth", idx, ".png"), depth);
    }
    write_png(frame_file(dir / "mask", idx, ".png"), mask);
    if (spec.write_inpainted) write_png(frame_file(dir / "rgb_inpainted", idx, ".png"), rasterize(background, k).rgb);

    const RigidTransform err_inv = invert(gt.estimator_error[idx]);
    write_keypoints_json(frame_file(dir / "keypoints", idx, ".json"), transform(err_inv, gt.keypoints[idx]));
    HandMesh mesh;
    mesh.vertices.reserve(verts_local.size());
    for (const auto& v : verts_local) mesh.vertices.push_back(err_inv * (hand_to_camera * v));
    write_mesh_vertices(frame_file(dir / "verts", idx, ".bin"), mesh);
  }
  return gt;
}

void write_config(const fs::path& path, const fs::path& chain_path, const fs::path& demos_root,
                  const fs::path& output) {
  PipelineConfig cfg;
  json j = json::parse(config_to_json(cfg));
  j["robot_chain"] = chain_path.string();
  j["demos_root"] = demos_root.string();
  j["output"] = output.string();
  write_json(path, j);
}

}  // namespace demoedit::synthetic
