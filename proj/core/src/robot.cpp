#include "demoedit/robot.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "demoedit/error.hpp"

namespace demoedit {

void KinematicChain::validate() const {
  if (joints.empty()) throw Error(ErrorCode::InvalidArgument, "chain needs at least one joint");
  for (const auto& j : joints) {
    if (!(j.lower < j.upper)) throw Error(ErrorCode::InvalidArgument, "joint " + j.name + " has lower >= upper");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "joint " + j.name + " axis is not unit length");
    }
  }
  if (home.size() != 0 && home.size() != dof()) {
    throw Error(ErrorCode::ConfigLengthMismatch, "home configuration length does not match the chain");
  }
  if (!(gripper.max_travel >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative gripper travel");
}

JointConfig KinematicChain::clamp(const JointConfig& q) const {
  JointConfig out = q;
  for (int i = 0; i < dof(); ++i) out(i) = std::clamp(q(i), joints[static_cast<std::size_t>(i)].lower, joints[static_cast<std::size_t>(i)].upper);
  return out;
}

bool KinematicChain::within_limits(const JointConfig& q) const {
  if (q.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i) {
    const auto& j = joints[static_cast<std::size_t>(i)];
    if (q(i) < j.lower || q(i) > j.upper) return false;
  }
  return true;
}

namespace {

void check_length(const KinematicChain& chain, const JointConfig& q) {
  if (q.size() != chain.dof()) {
    throw Error(ErrorCode::ConfigLengthMismatch, "joint configuration has " + std::to_string(q.size()) +
                                                     " entries, chain has " + std::to_string(chain.dof()));
  }
}

}  // namespace

FkResult forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  check_length(chain, q);
  FkResult out;
  out.link_poses.reserve(chain.joints.size());
  RigidTransform frame;
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const Joint& j = chain.joints[i];
    frame = frame * j.origin * RigidTransform::from_rotation(axis_angle(j.axis, q(static_cast<Eigen::Index>(i))));
    out.link_poses.push_back(frame);
  }
  out.ee_pose = frame * chain.ee_offset;
  return out;
}

Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  const FkResult fk = forward_kinematics(chain, q);
  const Vec3 ee = fk.ee_pose.translation();
  Jacobian J(6, chain.dof());
  RigidTransform parent;
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const RigidTransform joint_frame = parent * chain.joints[i].origin;
    const Vec3 axis = joint_frame.rotation() * chain.joints[i].axis;
    const Vec3 origin = joint_frame.translation();
    const auto c = static_cast<Eigen::Index>(i);
    J.block<3, 1>(0, c) = axis.cross(ee - origin);
    J.block<3, 1>(3, c) = axis;
    parent = fk.link_poses[i];
  }
  return J;
}

void IkParams::validate() const {
  if (!(damping > 0.0) || max_iterations < 1 || !(pos_tol > 0.0) || !(rot_tol > 0.0) || !(step_scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid IK parameters");
  }
}

Eigen::Matrix<double, 6, 1> pose_error(const RigidTransform& target, const RigidTransform& current) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.translation() - current.translation();
  e.tail<3>() = log_so3(target.rotation() * current.rotation().transpose());
  return e;
}

IkResult inverse_kinematics(const KinematicChain& chain, const RigidTransform& target, const JointConfig& seed,
                            const IkParams& params) {
  check_length(chain, seed);
  params.validate();
  IkResult r;
  r.q = chain.clamp(seed);
  Eigen::Matrix<double, 6, 1> err = pose_error(target, forward_kinematics(chain, r.q).ee_pose);
  double err_norm = err.norm();
  r.error_history.push_back(err_norm);
  const double lambda2 = params.damping * params.damping;

  auto done = [&] {
    r.position_error = err.head<3>().norm();
    r.rotation_error = err.tail<3>().norm();
    r.converged = r.position_error < params.pos_tol && r.rotation_error < params.rot_tol;
    return r.converged;
  };

  while (!done() && r.iterations < params.max_iterations) {
    ++r.iterations;
    const Jacobian J = jacobian(chain, r.q);
    const Eigen::Matrix<double, 6, 6> A = J * J.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    const JointConfig dq = J.transpose() * A.ldlt().solve(err);

    bool accepted = false;
    double step = params.step_scale;
    for (int h = 0; h <= params.max_step_halvings; ++h, step *= 0.5) {
      const JointConfig q_try = chain.clamp(r.q + step * dq);
      const auto e_try = pose_error(target, forward_kinematics(chain, q_try).ee_pose);
      const double n_try = e_try.norm();
      if (n_try <= err_norm) {
        r.q = q_try;
        err = e_try;
        err_norm = n_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent direction within the joint limits
    r.error_history.push_back(err_norm);
  }
  return r;
}

double gripper_joint_from_width(const KinematicChain& chain, double g) {
  if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorCode::OutOfRange, "gripper opening must lie in [0, 1]");
  return g * chain.gripper.max_travel;
}

namespace {

Vec3 vec3_from(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::SchemaError, what + " must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

RigidTransform origin_from(const nlohmann::json& j, const char* xyz_key, const char* rpy_key) {
  const Vec3 xyz = j.contains(xyz_key) ? vec3_from(j.at(xyz_key), xyz_key) : Vec3::Zero();
  const Vec3 r = j.contains(rpy_key) ? vec3_from(j.at(rpy_key), rpy_key) : Vec3::Zero();
  return {rpy(r.x(), r.y(), r.z()), xyz};
}

std::optional<TriangleMesh> mesh_from(const nlohmann::json& j, const std::filesystem::path& dir, bool load) {
  if (!load || !j.contains("mesh")) return std::nullopt;
  TriangleMesh m = read_mesh(dir / j.at("mesh").get<std::string>());
  if (j.contains("color")) {
    const auto& c = j.at("color");
    m.color = {c[0].get<std::uint8_t>(), c[1].get<std::uint8_t>(), c[2].get<std::uint8_t>()};
  }
  return m;
}

}  // namespace

KinematicChain load_chain(const std::filesystem::path& path, bool load_meshes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open chain file " + path.string());
  const std::filesystem::path dir = path.parent_path();
  KinematicChain chain;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    chain.name = j.value("name", std::string("robot"));
    if (j.contains("base")) chain.base_mesh = mesh_from(j.at("base"), dir, load_meshes);
    for (const auto& jj : j.at("joints")) {
      Joint joint;
      joint.name = jj.value("name", std::string("joint") + std::to_string(chain.joints.size() + 1));
      joint.origin = origin_from(jj, "origin_xyz", "origin_rpy");
      joint.axis = vec3_from(jj.at("axis"), "axis").normalized();
      const auto& lim = jj.at("limits");
      joint.lower = lim.at(0).get<double>();
      joint.upper = lim.at(1).get<double>();
      joint.mesh = mesh_from(jj, dir, load_meshes);
      chain.joints.push_back(std::move(joint));
    }
    if (j.contains("ee_offset")) chain.ee_offset = origin_from(j.at("ee_offset"), "xyz", "rpy");
    if (j.contains("gripper")) {
      const auto& g = j.at("gripper");
      chain.gripper.max_travel = g.value("max_travel", 0.04);
      if (load_meshes && g.contains("hand_mesh")) {
        chain.gripper.hand_mesh = mesh_from({{"mesh", g.at("hand_mesh")}, {"color", g.value("color", nlohmann::json::array({60, 60, 60}))}}, dir, true);
      }
      if (load_meshes && g.contains("finger_mesh")) {
        chain.gripper.finger_mesh = mesh_from({{"mesh", g.at("finger_mesh")}, {"color", g.value("color", nlohmann::json::array({60, 60, 60}))}}, dir, true);
      }
    }
    if (j.contains("home")) {
      const auto& h = j.at("home");
      chain.home.resize(static_cast<Eigen::Index>(h.size()));
      for (std::size_t i = 0; i < h.size(); ++i) chain.home(static_cast<Eigen::Index>(i)) = h[i].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
  chain.validate();
  return chain;
}

}  // namespace demoedit
