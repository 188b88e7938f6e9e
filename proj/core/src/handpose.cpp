#include "demoedit/handpose.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "demoedit/error.hpp"

namespace demoedit {

namespace {

constexpr double kPlaneTolerance = 1e-4;  // rad

struct HingeSpec {
  int grandparent;
  int parent;
  int joint;
  int child;
};

constexpr std::array<HingeSpec, kConstrainedJointCount> kHinges{{
    {1, 2, 3, 4},  // thumb IP
    {0, 5, 6, 7},  // index PIP
    {5, 6, 7, 8},  // index DIP
}};

bool is_descendant_or_self(int node, int ancestor) {
  for (int n = node; n >= 0; n = landmark::kParent[static_cast<std::size_t>(n)]) {
    if (n == ancestor) return true;
  }
  return false;
}

// Unit hinge axis from the two bones preceding the joint, or nullopt when
// they are parallel within the plane tolerance.
std::optional<Vec3> hinge_axis(const HandKeypoints& kp, const HingeSpec& h) {
  const Vec3 w = kp[h.parent] - kp[h.grandparent];
  const Vec3 u = kp[h.joint] - kp[h.parent];
  const Vec3 n = w.cross(u);
  const double angle = std::atan2(n.norm(), w.dot(u));
  if (!(angle > kPlaneTolerance) || angle > M_PI - kPlaneTolerance) return std::nullopt;
  return n.normalized();
}

double deg2rad(double d) { return d * M_PI / 180.0; }

}  // namespace

void HandKeypoints::validate() const {
  for (int i = 0; i < landmark::kCount; ++i) {
    if (!(*this)[i].allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "keypoint " + std::to_string(i) + " is not finite");
    }
  }
  for (int i = 1; i < landmark::kCount; ++i) {
    const double len = ((*this)[i] - (*this)[landmark::kParent[static_cast<std::size_t>(i)]]).norm();
    if (!(len > kMinBoneLength && len < kMaxBoneLength)) {
      throw Error(ErrorCode::InvalidArgument,
                  "bone ending at keypoint " + std::to_string(i) + " has length " + std::to_string(len));
    }
  }
}

void HandMesh::validate() const {
  if (vertices.size() != static_cast<std::size_t>(kHandMeshVertexCount)) {
    throw Error(ErrorCode::InvalidArgument, "hand mesh must have 778 vertices");
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::InvalidArgument, "hand mesh vertex is not finite");
  }
}

void JointLimits::validate() const {
  for (const auto& r : ranges) {
    if (!(r.min_deg < r.max_deg)) throw Error(ErrorCode::InvalidArgument, "flexion range needs min < max");
  }
}

HandKeypoints transform(const RigidTransform& T, const HandKeypoints& kp) {
  HandKeypoints out;
  for (int i = 0; i < landmark::kCount; ++i) out[i] = apply(T, kp[i]);
  return out;
}

double flexion_angle(const HandKeypoints& kp, ConstrainedJoint joint) {
  const HingeSpec& h = kHinges[static_cast<std::size_t>(joint)];
  auto n = joint == ConstrainedJoint::IndexDip ? hinge_axis(kp, kHinges[1]) : std::nullopt;
  if (!n) n = hinge_axis(kp, h);
  if (!n) throw Error(ErrorCode::DegenerateGeometry, "flexion plane undefined");
  const Vec3 u = (kp[h.joint] - kp[h.parent]).normalized();
  const Vec3 d = kp[h.child] - kp[h.joint];
  const Vec3 d_in = d - d.dot(*n) * *n;
  return std::atan2(u.cross(d_in).dot(*n), u.dot(d_in));
}

ConstrainedHand constrain_finger_joints(const HandKeypoints& kp, const JointLimits& limits) {
  ConstrainedHand out{kp, {}};
  HandKeypoints& x = out.keypoints;
  std::optional<Vec3> index_axis;  // hinge axes of one finger are parallel

  for (std::size_t j = 0; j < kHinges.size(); ++j) {
    const HingeSpec& h = kHinges[j];
    const bool index_finger = j > 0;
    // The DIP reuses the corrected PIP axis so both hinges share one sign.
    std::optional<Vec3> n = index_finger && index_axis ? index_axis : hinge_axis(x, h);
    if (!n) {
      out.report.degenerate[j] = true;
      continue;
    }
    if (index_finger) index_axis = n;

    const Vec3 u = (x[h.joint] - x[h.parent]).normalized();
    const Vec3 d = x[h.child] - x[h.joint];
    const double length = d.norm();
    const Vec3 d_in = d - d.dot(*n) * *n;
    if (d_in.norm() <= 1e-9 * length) {
      // Bone is perpendicular to the hinge plane; no in-plane direction exists.
      out.report.degenerate[j] = true;
      continue;
    }
    const double theta = std::atan2(u.cross(d_in).dot(*n), u.dot(d_in));
    const FlexionRange& range = limits.ranges[j];
    const double clamped = std::clamp(theta, deg2rad(range.min_deg), deg2rad(range.max_deg));
    if (clamped == theta && std::abs(d.dot(*n)) <= 1e-12 * length) continue;

    const Vec3 d_new = length * (std::cos(clamped) * u + std::sin(clamped) * n->cross(u));
    const RotationMatrix Q = Eigen::Quaterniond::FromTwoVectors(d, d_new).toRotationMatrix();
    const Vec3 pivot = x[h.joint];
    for (int i = 0; i < landmark::kCount; ++i) {
      if (i == h.child) {
        x[i] = pivot + d_new;
      } else if (is_descendant_or_self(i, h.child)) {
        x[i] = pivot + Q * (x[i] - pivot);
      }
    }
  }
  return out;
}

FingertipPair fingertip_pair(const HandKeypoints& kp) {
  return {kp[landmark::kThumbTip], kp[landmark::kIndexTip]};
}

HandKeypoints read_keypoints_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
  if (!j.is_array() || j.size() != static_cast<std::size_t>(landmark::kCount)) {
    throw Error(ErrorCode::SchemaError, path.string() + ": expected an array of 21 [x,y,z] triples");
  }
  HandKeypoints kp;
  for (int i = 0; i < landmark::kCount; ++i) {
    const auto& p = j[static_cast<std::size_t>(i)];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      throw Error(ErrorCode::SchemaError, path.string() + ": keypoint " + std::to_string(i) + " is malformed");
    }
    kp[i] = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return kp;
}

void write_keypoints_json(const std::filesystem::path& path, const HandKeypoints& kp) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < landmark::kCount; ++i) j.push_back({kp[i].x(), kp[i].y(), kp[i].z()});
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump() << '\n';
}

static_assert(std::endian::native == std::endian::little, "vertex files are read as host-order float32");

HandMesh read_mesh_vertices(const std::filesystem::path& path) {
  constexpr std::size_t kBytes = static_cast<std::size_t>(kHandMeshVertexCount) * 3 * sizeof(float);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<float> raw(static_cast<std::size_t>(kHandMeshVertexCount) * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(kBytes));
  if (in.gcount() != static_cast<std::streamsize>(kBytes) || in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::SchemaError, path.string() + ": expected exactly 9336 bytes of float32 vertices");
  }
  HandMesh mesh;
  mesh.vertices.reserve(kHandMeshVertexCount);
  for (std::size_t i = 0; i < raw.size(); i += 3) mesh.vertices.emplace_back(raw[i], raw[i + 1], raw[i + 2]);
  return mesh;
}

void write_mesh_vertices(const std::filesystem::path& path, const HandMesh& mesh) {
  mesh.validate();
  std::vector<float> raw;
  raw.reserve(mesh.vertices.size() * 3);
  for (const auto& v : mesh.vertices) {
    raw.push_back(static_cast<float>(v.x()));
    raw.push_back(static_cast<float>(v.y()));
    raw.push_back(static_cast<float>(v.z()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
}

}  // namespace demoedit
