// Copyright 2026 The EgoDemo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "egodemo/error.hpp"
#include "egodemo/geometry.hpp"
#include "egodemo/random.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace egodemo {
namespace {

using oracle::Mat4;

RigidTransform random_transform(Rng& rng) {
  const Eigen::Vector3d axis(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1) + 1e-3);
  const Eigen::Vector3d t(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
  return RigidTransform::from_translation(t) * RigidTransform::from_axis_angle(axis, uniform(rng, -kPi, kPi));
}

TEST(RigidTransform, ComposeWithInverseIsIdentity) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform t = random_transform(rng);
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t * t.inverse()), oracle::mat_identity()), 1e-9);
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t.inverse() * t), oracle::mat_identity()), 1e-9);
  }
}

TEST(RigidTransform, CompositionIsAssociative) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a = random_transform(rng);
    const RigidTransform b = random_transform(rng);
    const RigidTransform c = random_transform(rng);
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat((a * b) * c), oracle::to_mat(a * (b * c))), 1e-9);
  }
}

TEST(RigidTransform, CompositionMatchesHomogeneousMatrices) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a = random_transform(rng);
    const RigidTransform b = random_transform(rng);
    const Mat4 m = oracle::mat_mul(oracle::to_mat(a), oracle::to_mat(b));
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(a * b), m), 1e-12);
  }
}

TEST(RigidTransform, LongChainsStayOrthonormal) {
  Rng rng(4);
  RigidTransform acc;
  for (int i = 0; i < 1000; ++i) acc = acc * random_transform(rng);
  const Eigen::Matrix3d r = acc.rotation();
  EXPECT_LT((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  const RigidTransform fixed = acc.orthonormalized();
  const Eigen::Matrix3d q = fixed.rotation();
  EXPECT_LT((q * q.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((q - r).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RigidTransform, FromMatrixRejectsNonRotations) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = 2.0;
  EXPECT_THROW(RigidTransform::from_matrix(m), InvalidArgument);
  m = Eigen::Matrix4d::Identity();
  m(0, 0) = -1.0;  // reflection
  EXPECT_THROW(RigidTransform::from_matrix(m), InvalidArgument);
  m = Eigen::Matrix4d::Identity();
  m(3, 0) = 0.5;
  EXPECT_THROW(RigidTransform::from_matrix(m), InvalidArgument);
}

TEST(EgoMotion, ZeroMotionIsIdentity) {
  const RigidTransform t = ego_motion_to_base_transform({0, 0, 0});
  EXPECT_EQ(t.rotation(), Eigen::Matrix3d::Identity());
  EXPECT_EQ(t.translation(), Eigen::Vector3d::Zero());
}

// New-frame coordinates are D^-1 p with D = Trans(dx, dy, 0) Rz(dtheta).
std::array<double, 3> oracle_new_coords(const EgoMotion& m, double x, double y, double z) {
  const Mat4 d = oracle::mat_mul(oracle::mat_translation(m.dx, m.dy, 0), oracle::mat_rot_z(m.dtheta));
  return oracle::mat_apply(oracle::mat_rigid_inverse(d), x, y, z);
}

TEST(EgoMotion, QuarterTurnMapsXToMinusY) {
  const EgoMotion m{0, 0, kPi / 2};
  const Eigen::Vector3d p = ego_motion_to_base_transform(m) * Eigen::Vector3d(1, 0, 0);
  const auto o = oracle_new_coords(m, 1, 0, 0);
  EXPECT_NEAR(o[0], 0.0, 1e-12);
  EXPECT_NEAR(o[1], -1.0, 1e-12);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(p[k], o[k], 1e-12);
}

TEST(EgoMotion, ForwardStepMovesOriginBack) {
  const EgoMotion m{0.1, 0, 0};
  const Eigen::Vector3d p = ego_motion_to_base_transform(m) * Eigen::Vector3d::Zero();
  const auto o = oracle_new_coords(m, 0, 0, 0);
  EXPECT_NEAR(o[0], -0.1, 1e-15);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(p[k], o[k], 1e-15);
}

TEST(EgoMotion, MatchesMatrixOracleOnRandomMotions) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const EgoMotion m{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -kPi, kPi)};
    const RigidTransform t = ego_motion_to_base_transform(m);
    const Eigen::Vector3d p(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const Eigen::Vector3d q = t * p;
    const auto o = oracle_new_coords(m, p.x(), p.y(), p.z());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(q[k], o[k], 1e-12);
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t * t.inverse()), oracle::mat_identity()), 1e-12);
  }
}

CameraModel tilted_camera(const RigidTransform& extrinsic) {
  CameraModel c = testing::toy_camera(64, 48);
  c.cam_from_base = extrinsic;
  return c;
}

TEST(CameraRelative, ZeroMotionIsExactIdentity) {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = camera_relative_transform(tilted_camera(random_transform(rng)), {});
    EXPECT_EQ(t.rotation(), Eigen::Matrix3d::Identity());
    EXPECT_EQ(t.translation(), Eigen::Vector3d::Zero());
  }
}

TEST(CameraRelative, IdentityExtrinsicForwardStep) {
  const RigidTransform t = camera_relative_transform(tilted_camera({}), {0.1, 0, 0});
  EXPECT_LT((t.rotation() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(t.translation().x(), -0.1, 1e-15);
  EXPECT_NEAR(t.translation().y(), 0.0, 1e-15);
  EXPECT_NEAR(t.translation().z(), 0.0, 1e-15);
}

TEST(CameraRelative, ConjugatedRotationMatchesOracle) {
  const RigidTransform ext = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitX(), kPi / 2);
  const EgoMotion m{0, 0, deg_to_rad(7.0)};
  const RigidTransform t = camera_relative_transform(tilted_camera(ext), m);
  const Mat4 c = oracle::mat_rot_x(kPi / 2);
  const Mat4 tv = oracle::mat_rigid_inverse(oracle::mat_rot_z(m.dtheta));
  const Mat4 expected = oracle::mat_mul(oracle::mat_mul(c, tv), oracle::mat_rigid_inverse(c));
  EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t), expected), 1e-12);
}

TEST(CameraRelative, PureRotationPreservesNorms) {
  Rng rng(7);
  const CameraModel cam = tilted_camera(random_transform(rng));
  for (int i = 0; i < 50; ++i) {
    const RigidTransform t = camera_relative_transform(cam, {0, 0, uniform(rng, -0.5, 0.5)});
    const Eigen::Vector3d v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    EXPECT_NEAR(t.rotate(v).norm(), v.norm(), 1e-9);
  }
}

TEST(SampleEgoMotion, DegenerateRangeGivesZero) {
  const ViewpointRange r{{0, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(sample_ego_motion(r, 9), EgoMotion{});
}

TEST(SampleEgoMotion, SimRangeBoundsAndDeterminism) {
  const ViewpointRange r = ViewpointRange::simulation();
  EXPECT_EQ(r.dx, (Interval{-0.1, 0.1}));
  EXPECT_EQ(r.dy, (Interval{-0.1, 0.1}));
  EXPECT_DOUBLE_EQ(r.dtheta.upper, deg_to_rad(10.0));
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const EgoMotion m = sample_ego_motion(r, s);
    ASSERT_TRUE(r.dx.contains(m.dx) && r.dy.contains(m.dy) && r.dtheta.contains(m.dtheta)) << s;
  }
  EXPECT_EQ(sample_ego_motion(r, 42), sample_ego_motion(r, 42));
  EXPECT_NE(sample_ego_motion(r, 42), sample_ego_motion(r, 43));
}

TEST(SampleEgoMotion, RealRangeNeverDrivesForward) {
  const ViewpointRange r = ViewpointRange::real_robot();
  EXPECT_EQ(r.dx, (Interval{-0.1, 0.0}));
  for (std::uint64_t s = 0; s < 1000; ++s) EXPECT_LE(sample_ego_motion(r, s).dx, 0.0);
}

TEST(ViewpointRange, RejectsInvertedInterval) {
  ViewpointRange r = ViewpointRange::simulation();
  r.dy = {0.1, -0.1};
  EXPECT_THROW(r.validate(), InvalidArgument);
}

TEST(CameraModel, ValidationRules) {
  CameraModel c = testing::toy_camera(64, 48);
  EXPECT_NO_THROW(c.validate());
  CameraModel bad = c;
  bad.fx = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.cx = 64;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.depth_unit_mm = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = c;
  bad.depth_max = -1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(CameraModel, JsonRoundTripIsBitExact) {
  Rng rng(8);
  CameraModel c = testing::toy_camera(64, 48, 51.123456789012345);
  c.cy = 23.1 / 3.0;
  c.depth_unit_mm = 0.25;
  c.cam_from_base = random_transform(rng);
  EXPECT_EQ(camera_from_json(camera_to_json(c)), c);
  const CameraModel shipped = testing::sim_camera();
  EXPECT_EQ(shipped.width, 320);
  EXPECT_EQ(shipped.height, 240);
  EXPECT_EQ(camera_from_json(camera_to_json(shipped)), shipped);
}

TEST(CameraModel, MalformedCalibrationIsDataError) {
  EXPECT_THROW(camera_from_json("{ not json"), DataError);
  EXPECT_THROW(camera_from_json("[1, 2]"), DataError);
  EXPECT_THROW(camera_from_json(R"({"fx": 1})"), DataError);
}

}  // namespace
}  // namespace egodemo
