#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "demoedit/error.hpp"
#include "demoedit/handpose.hpp"
#include "demoedit/synthetic.hpp"
#include "hand_fixture.hpp"
#include "random.hpp"

using namespace demoedit;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = M_PI / 180.0;

double max_diff(const HandKeypoints& a, const HandKeypoints& b) {
  double m = 0.0;
  for (int i = 0; i < landmark::kCount; ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST(FingerConstraints, SatisfiedHandUnchanged) {
  const HandKeypoints kp = testhand::make_hand();
  const ConstrainedHand out = constrain_finger_joints(kp, JointLimits{});
  EXPECT_LE(max_diff(out.keypoints, kp), 1e-12);
  EXPECT_FALSE(out.report.any_degenerate());
  EXPECT_NEAR(flexion_angle(kp, ConstrainedJoint::IndexPip), 30.0 * kDeg, 1e-12);
}

TEST(FingerConstraints, OutOfPlaneTipProjected) {
  HandKeypoints kp = testhand::make_hand();
  kp[8].z() += 0.005;
  const double bone = (kp[8] - kp[7]).norm();
  const ConstrainedHand out = constrain_finger_joints(kp, JointLimits{});
  // Hinge plane of the index DIP is z = 0 (bones 5->6 and 6->7).
  EXPECT_NEAR(out.keypoints[8].z(), 0.0, 1e-9);
  EXPECT_NEAR((out.keypoints[8] - out.keypoints[7]).norm(), bone, 1e-9);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(out.keypoints[i], kp[i]);
}

TEST(FingerConstraints, FlexionClampedToMax) {
  const HandKeypoints kp = testhand::make_hand(20.0, 30.0, 130.0);
  const ConstrainedHand out = constrain_finger_joints(kp, JointLimits{});
  EXPECT_NEAR(flexion_angle(out.keypoints, ConstrainedJoint::IndexDip), 115.0 * kDeg, 1e-12);
  EXPECT_NEAR((out.keypoints[8] - out.keypoints[7]).norm(), (kp[8] - kp[7]).norm(), 1e-12);
}

TEST(FingerConstraints, HyperextensionClampedAndDistalFollows) {
  const HandKeypoints kp = testhand::make_hand(20.0, -30.0, 25.0);
  const ConstrainedHand out = constrain_finger_joints(kp, JointLimits{});
  EXPECT_NEAR(flexion_angle(out.keypoints, ConstrainedJoint::IndexPip), -5.0 * kDeg, 1e-12);
  // The DIP angle is carried along rigidly.
  EXPECT_NEAR(flexion_angle(out.keypoints, ConstrainedJoint::IndexDip), 25.0 * kDeg, 1e-9);
}

TEST(FingerConstraints, RigidMotionCommutes) {
  oracle::Rng rng(3);
  HandKeypoints kp = testhand::make_hand(140.0, 30.0, 25.0);
  kp[7].z() += 0.004;
  const RigidTransform T(oracle::random_rotation(rng), Vec3(0.1, -0.2, 0.5));
  const HandKeypoints a = transform(T, constrain_finger_joints(kp, JointLimits{}).keypoints);
  const HandKeypoints b = constrain_finger_joints(transform(T, kp), JointLimits{}).keypoints;
  EXPECT_LE(max_diff(a, b), 1e-9);
}

TEST(FingerConstraints, StraightFingerIsDegenerate) {
  HandKeypoints kp = testhand::make_hand(20.0, 30.0, 25.0);
  testhand::planar_chain(kp, 0, {1, 2, 3, 4}, -40.0, {0.04, 0.035, 0.03, 0.025}, {0.0, 0.0, 0.0, 20.0});
  const ConstrainedHand out = constrain_finger_joints(kp, JointLimits{});
  EXPECT_TRUE(out.report.degenerate[0]);
  EXPECT_EQ(out.keypoints[4], kp[4]);
  EXPECT_THROW(flexion_angle(kp, ConstrainedJoint::ThumbIp), Error);
}

TEST(FingertipPair, ReadsTipLandmarks) {
  HandKeypoints kp = testhand::make_hand();
  kp[4] = Vec3(1, 2, 3);
  EXPECT_EQ(fingertip_pair(kp).thumb_tip, Vec3(1, 2, 3));
  EXPECT_EQ(fingertip_pair(kp).index_tip, kp[8]);
}

TEST(FingertipPair, SymmetricHand) {
  const HandKeypoints kp = synthetic::hand_keypoints_local(0.06);
  const FingertipPair tips = fingertip_pair(kp);
  const Vec3 mirrored(tips.index_tip.x(), -tips.index_tip.y(), tips.index_tip.z());
  EXPECT_LT((tips.thumb_tip - mirrored).norm(), 1e-15);
}

TEST(FingertipPair, MatchesGenerator) {
  synthetic::DemoSpec spec;
  spec.frames = 30;
  const synthetic::GroundTruth gt = synthetic::ground_truth(spec);
  for (std::size_t i = 0; i < gt.keypoints.size(); ++i) {
    const FingertipPair tips = fingertip_pair(gt.keypoints[i]);
    EXPECT_NEAR((tips.thumb_tip - tips.index_tip).norm(), gt.fingertip_distance[i], 1e-12);
  }
}

TEST(HandFiles, KeypointsRoundTrip) {
  const fs::path p = fs::temp_directory_path() / "demoedit_kp_test.json";
  const HandKeypoints kp = testhand::make_hand();
  write_keypoints_json(p, kp);
  EXPECT_LE(max_diff(read_keypoints_json(p), kp), 0.0);
  fs::remove(p);
}

TEST(HandFiles, VerticesRoundTripAsFloat32) {
  const fs::path p = fs::temp_directory_path() / "demoedit_verts_test.bin";
  HandMesh mesh{synthetic::hand_vertices_local()};
  write_mesh_vertices(p, mesh);
  EXPECT_EQ(fs::file_size(p), 9336u);
  const HandMesh back = read_mesh_vertices(p);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    EXPECT_EQ(back.vertices[i], mesh.vertices[i].cast<float>().cast<double>());
  }
  std::ofstream(p, std::ios::binary) << "short";
  EXPECT_THROW(read_mesh_vertices(p), Error);
  fs::remove(p);
}

TEST(HandKeypointsValidate, RejectsBadBones) {
  HandKeypoints kp = testhand::make_hand();
  EXPECT_NO_THROW(kp.validate());
  kp[8] = kp[7];
  EXPECT_THROW(kp.validate(), Error);
  kp = testhand::make_hand();
  kp[3].x() = std::nan("");
  EXPECT_THROW(kp.validate(), Error);
}
