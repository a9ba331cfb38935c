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
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "egodemo/error.hpp"
#include "egodemo/ik.hpp"
#include "egodemo/kinematics.hpp"
#include "egodemo/random.hpp"
#include "egodemo/robot_model.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace egodemo {
namespace {

using testing::dual_arm;
using testing::planar;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::VectorXd random_joints(const ArmChain& chain, Rng& rng) {
  Eigen::VectorXd q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) q[i] = uniform(rng, chain.lower[i], chain.upper[i]);
  return q;
}

Eigen::VectorXd planar_q(double a, double b) {
  Eigen::VectorXd q(2);
  q << a, b;
  return q;
}

// Hand-composed chain for the planar fixture: Rz(q1) * T(0.3) * Rz(q2) * T(0.2).
oracle::Mat4 planar_oracle(double q1, double q2) {
  using namespace oracle;
  return mat_mul(mat_mul(mat_mul(mat_rot_z(q1), mat_translation(0.3, 0, 0)), mat_rot_z(q2)),
                 mat_translation(0.2, 0, 0));
}

TEST(RobotModel, PlanarFixtureHasTwoRevoluteJoints) {
  const RobotModel& m = planar();
  EXPECT_EQ(m.name(), "planar");
  int revolute = 0;
  for (const auto& j : m.joints()) revolute += j.type == JointType::kRevolute;
  EXPECT_EQ(revolute, 2);
  EXPECT_TRUE(m.has_arm(Arm::kLeft));
  EXPECT_FALSE(m.has_arm(Arm::kRight));
  EXPECT_EQ(m.arm(Arm::kLeft).dof(), 2);
  EXPECT_THROW(m.arm(Arm::kRight), InvalidArgument);
}

TEST(RobotModel, DualArmMountsAreSymmetric) {
  const RobotModel& m = dual_arm();
  ASSERT_TRUE(m.has_arm(Arm::kLeft) && m.has_arm(Arm::kRight));
  EXPECT_EQ(m.arm(Arm::kLeft).dof(), 6);
  EXPECT_EQ(m.arm(Arm::kRight).dof(), 6);
  const Eigen::Vector3d l = m.arm(Arm::kLeft).mount_pose.translation();
  const Eigen::Vector3d r = m.arm(Arm::kRight).mount_pose.translation();
  EXPECT_NEAR(l.y(), 0.34, 1e-12);
  EXPECT_NEAR(r.y(), -0.34, 1e-12);
  EXPECT_NEAR((l - r).norm(), 0.68, 1e-12);
  EXPECT_EQ(m.config_size(), 14);
  EXPECT_EQ(m.layout().arm_offset, (std::array<int, 2>{0, 7}));
  EXPECT_EQ(m.layout().gripper_offset, (std::array<int, 2>{6, 13}));
}

TEST(RobotModel, CycleIsReportedWithJointNames) {
  const auto xml = read_file(testing::fixture_dir() / "cycle.urdf");
  RobotDescription desc;
  desc.base_link = "base_link";
  desc.left = ArmDescription{"base_link", "d", {}, {}};
  try {
    parse_robot_model(xml, desc, "cycle.urdf");
    FAIL() << "expected a cycle error";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("cycle"), std::string::npos) << what;
    EXPECT_NE(what.find("j_ab"), std::string::npos) << what;
    EXPECT_NE(what.find("j_bc"), std::string::npos) << what;
    EXPECT_NE(what.find("j_ca"), std::string::npos) << what;
  }
}

TEST(RobotModel, MalformedXmlCarriesLine) {
  RobotDescription desc;
  desc.base_link = "base_link";
  try {
    parse_robot_model("<robot name=\"x\">\n<link name=\"a\">\n</robot>", desc, "bad.urdf");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0);
  }
}

TEST(RobotModel, ActuatedJointNeedsLimits) {
  const std::string xml = R"(<robot name="r">
  <link name="base_link"/><link name="a"/>
  <joint name="j" type="revolute"><parent link="base_link"/><child link="a"/><axis xyz="0 0 1"/></joint>
</robot>)";
  RobotDescription desc;
  desc.base_link = "base_link";
  desc.left = ArmDescription{"base_link", "a", {"j"}, {}};
  EXPECT_THROW(parse_robot_model(xml, desc), DataError);
}

TEST(RobotModel, DanglingLinkReferenceIsRejected) {
  const std::string xml = R"(<robot name="r">
  <link name="base_link"/>
  <joint name="j" type="fixed"><parent link="base_link"/><child link="ghost"/></joint>
</robot>)";
  RobotDescription desc;
  desc.base_link = "base_link";
  desc.left = ArmDescription{"base_link", "base_link", {}, {}};
  EXPECT_THROW(parse_robot_model(xml, desc), DataError);
}

TEST(RobotModel, UnsupportedElementsWarn) {
  const std::string xml = R"(<robot name="r">
  <link name="base_link"/><link name="a"/>
  <joint name="j" type="revolute"><parent link="base_link"/><child link="a"/><axis xyz="0 0 1"/>
    <limit lower="-1" upper="1"/></joint>
  <transmission name="t"/>
  <gazebo/>
</robot>)";
  RobotDescription desc;
  desc.base_link = "base_link";
  desc.left = ArmDescription{"base_link", "a", {"j"}, {}};
  const RobotModel m = parse_robot_model(xml, desc);
  EXPECT_GE(m.warnings().size(), 2u);
}

TEST(ForwardKinematics, PlanarZeroConfiguration) {
  const RigidTransform t = forward_kinematics(planar(), Arm::kLeft, planar_q(0, 0));
  EXPECT_LT((t.translation() - Eigen::Vector3d(0.5, 0, 0)).norm(), 1e-15);
  EXPECT_LT((t.rotation() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardKinematics, PlanarQuarterTurn) {
  const RigidTransform t = forward_kinematics(planar(), Arm::kLeft, planar_q(kPi / 2, 0));
  EXPECT_LT((t.translation() - Eigen::Vector3d(0, 0.5, 0)).norm(), 1e-12);
  EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t), planar_oracle(kPi / 2, 0)), 1e-12);
}

TEST(ForwardKinematics, PlanarMatchesChainOracle) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = uniform(rng, -3.1, 3.1);
    const double b = uniform(rng, -3.1, 3.1);
    const RigidTransform t = forward_kinematics(planar(), Arm::kLeft, planar_q(a, b));
    EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(t), planar_oracle(a, b)), 1e-12);
  }
}

TEST(ForwardKinematics, OutOfLimitsNamesJoint) {
  try {
    forward_kinematics(planar(), Arm::kLeft, planar_q(0, 3.5));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("joint2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(forward_kinematics(planar(), Arm::kLeft, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(LinkPoses, ZeroConfigIsCumulativeFixedOrigins) {
  const std::vector<double> config(planar().config_size(), 0.0);
  const auto poses = link_pose_map(planar(), config);
  EXPECT_LT((poses.at("base_link").translation()).norm(), 1e-15);
  EXPECT_LT((poses.at("link2").translation() - Eigen::Vector3d(0.3, 0, 0)).norm(), 1e-15);
  EXPECT_LT((poses.at("tip").translation() - Eigen::Vector3d(0.5, 0, 0)).norm(), 1e-15);
}

TEST(LinkPoses, EndEffectorMatchesForwardKinematics) {
  const RobotModel& m = dual_arm();
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> config(m.config_size(), 0.0);
    for (Arm arm : kArms) set_arm_joints(m, config, arm, random_joints(m.arm(arm), rng));
    const auto poses = link_pose_map(m, config);
    for (Arm arm : kArms) {
      const RigidTransform fk = forward_kinematics(m, arm, arm_joints(m, config, arm));
      EXPECT_LT(oracle::mat_max_diff(oracle::to_mat(poses.at(m.arm(arm).ee_link)), oracle::to_mat(fk)), 1e-12);
    }
  }
}

TEST(LinkPoses, ArmsAreIndependent) {
  const RobotModel& m = dual_arm();
  Rng rng(13);
  std::vector<double> a(m.config_size(), 0.0);
  set_arm_joints(m, a, Arm::kLeft, random_joints(m.arm(Arm::kLeft), rng));
  std::vector<double> b = a;
  set_arm_joints(m, b, Arm::kRight, random_joints(m.arm(Arm::kRight), rng));
  const auto pa = link_pose_map(m, a);
  const auto pb = link_pose_map(m, b);
  for (const auto& [name, pose] : pa) {
    if (name.rfind("l_", 0) == 0) {
      EXPECT_EQ(pose, pb.at(name)) << name;
    }
  }
}

TEST(LinkPoses, GripperChannelDrivesFingers) {
  const RobotModel& m = dual_arm();
  std::vector<double> closed(m.config_size(), 0.0);
  std::vector<double> open = closed;
  open[m.layout().gripper_offset[0]] = 1.0;
  const auto pc = link_pose_map(m, closed);
  const auto po = link_pose_map(m, open);
  double moved = 0.0;
  for (const auto& [name, pose] : pc) moved = std::max(moved, (pose.translation() - po.at(name).translation()).norm());
  EXPECT_NEAR(moved, 0.04, 1e-12);
}

TEST(Jacobian, MatchesCentralDifferences) {
  const RobotModel& m = dual_arm();
  Rng rng(14);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    for (Arm arm : kArms) {
      const ArmChain& chain = m.arm(arm);
      Eigen::VectorXd q = random_joints(chain, rng);
      for (int i = 0; i < chain.dof(); ++i) q[i] = std::clamp(q[i], chain.lower[i] + 2 * h, chain.upper[i] - 2 * h);
      const Jacobian j = arm_jacobian(m, arm, q);
      ASSERT_EQ(j.cols(), chain.dof());
      for (int i = 0; i < chain.dof(); ++i) {
        Eigen::VectorXd qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        const RigidTransform tp = forward_kinematics(m, arm, qp);
        const RigidTransform tm = forward_kinematics(m, arm, qm);
        const Eigen::Vector3d dv = (tp.translation() - tm.translation()) / (2 * h);
        const Eigen::Vector3d dw = rotation_log(tp.rotation() * tm.rotation().transpose()) / (2 * h);
        for (int r = 0; r < 3; ++r) {
          EXPECT_NEAR(j(r, i), dv[r], 1e-5);
          EXPECT_NEAR(j(r + 3, i), dw[r], 1e-5);
        }
      }
    }
  }
}

TEST(SolveIk, AlreadyAtSolution) {
  const RobotModel& m = dual_arm();
  Rng rng(15);
  const Eigen::VectorXd q = random_joints(m.arm(Arm::kLeft), rng);
  const IkResult r = solve_ik(m, Arm::kLeft, forward_kinematics(m, Arm::kLeft, q), q, IkSchedule::defaults(), 1);
  EXPECT_EQ(r.status, IkStatus::kConverged);
  EXPECT_EQ(r.stage, 0);
  EXPECT_LT((r.joints - q).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(r.position_error, 1e-9);
}

TEST(SolveIk, SmallPerturbationConvergesAtFirstStage) {
  const RobotModel& m = dual_arm();
  const IkSchedule schedule = IkSchedule::defaults();
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    for (Arm arm : kArms) {
      const ArmChain& chain = m.arm(arm);
      const Eigen::VectorXd q = random_joints(chain, rng);
      Eigen::VectorXd init = q;
      for (int i = 0; i < chain.dof(); ++i)
        init[i] = std::clamp(q[i] + (rng() & 1 ? 0.1 : -0.1), chain.lower[i], chain.upper[i]);
      const RigidTransform target = forward_kinematics(m, arm, q);
      const IkResult r = solve_ik(m, arm, target, init, schedule, trial);
      ASSERT_EQ(r.status, IkStatus::kConverged);
      EXPECT_EQ(r.stage, 0);
      // Independent check through FK.
      const PoseError e = pose_error(forward_kinematics(m, arm, r.joints), target);
      EXPECT_LE(e.position, schedule.stages[0].position_tolerance);
      EXPECT_LE(e.orientation, schedule.stages[0].orientation_tolerance);
    }
  }
}

TEST(SolveIk, UnreachableTargetFails) {
  const RobotModel& m = dual_arm();
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(6);
  const RigidTransform target = RigidTransform::from_translation(Eigen::Vector3d(10.0, 0, 0));
  const IkResult r = solve_ik(m, Arm::kLeft, target, q, IkSchedule::defaults(), 3);
  EXPECT_EQ(r.status, IkStatus::kFailed);
  EXPECT_EQ(r.stage, -1);
  EXPECT_GT(r.position_error, 1.0);
}

TEST(SolveIk, ResultsStayWithinLimitsAndAreDeterministic) {
  const RobotModel& m = dual_arm();
  const ArmChain& chain = m.arm(Arm::kRight);
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd q = random_joints(chain, rng);
    const Eigen::VectorXd init = random_joints(chain, rng);
    const RigidTransform target = forward_kinematics(m, Arm::kRight, q);
    const IkResult a = solve_ik(m, Arm::kRight, target, init, IkSchedule::defaults(), 99);
    const IkResult b = solve_ik(m, Arm::kRight, target, init, IkSchedule::defaults(), 99);
    EXPECT_EQ(a, b);
    for (int i = 0; i < chain.dof(); ++i) {
      EXPECT_GE(a.joints[i], chain.lower[i]);
      EXPECT_LE(a.joints[i], chain.upper[i]);
    }
    if (a.status == IkStatus::kConverged) {
      const IkStage s = IkSchedule::defaults().stages[a.stage];
      EXPECT_LE(a.position_error, s.position_tolerance);
      EXPECT_LE(a.orientation_error, s.orientation_tolerance);
    }
  }
}

TEST(SolveIk, MaskedJointsStayFrozen) {
  const RobotModel& m = dual_arm();
  IkSchedule schedule = IkSchedule::defaults();
  schedule.joint_mask = {false, false, false, false, false, true};
  Rng rng(18);
  const ArmChain& chain = m.arm(Arm::kLeft);
  const Eigen::VectorXd q = random_joints(chain, rng);
  Eigen::VectorXd init = q;
  init[0] += 0.05;
  const IkResult r = solve_ik(m, Arm::kLeft, forward_kinematics(m, Arm::kLeft, q), init, schedule, 4);
  EXPECT_EQ(r.joints[5], init[5]);
}

TEST(SolveIk, PlanarChainRecoversReachablePoses) {
  Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd q = planar_q(uniform(rng, -3, 3), uniform(rng, -3, 3));
    const IkResult r = solve_ik(planar(), Arm::kLeft, forward_kinematics(planar(), Arm::kLeft, q), q,
                                IkSchedule::defaults(), i);
    EXPECT_EQ(r.status, IkStatus::kConverged);
  }
}

TEST(IkSchedule, ValidationRejectsTighteningStages) {
  IkSchedule s = IkSchedule::defaults();
  EXPECT_NO_THROW(s.validate());
  ASSERT_EQ(s.stages.size(), 3u);
  EXPECT_EQ(s.stages[2].max_iterations, 200);
  EXPECT_EQ(s.restarts, 5);
  std::swap(s.stages[0], s.stages[1]);
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = IkSchedule::defaults();
  s.stages[0].max_iterations = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = IkSchedule::defaults();
  s.stages.clear();
  EXPECT_THROW(s.validate(), InvalidArgument);
}

}  // namespace
}  // namespace egodemo
