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

#include "egodemo/kinematics.hpp"

#include <algorithm>
#include <sstream>

#include "egodemo/error.hpp"

namespace egodemo {

namespace {

RigidTransform joint_motion(JointType type, const Eigen::Vector3d& axis, double q) {
  switch (type) {
    case JointType::kRevolute:
      return RigidTransform::from_rotation(Eigen::AngleAxisd(q, axis).toRotationMatrix());
    case JointType::kPrismatic:
      return RigidTransform::from_translation(axis * q);
    case JointType::kFixed:
      break;
  }
  return RigidTransform::identity();
}

void check_size(const ArmChain& chain, const Eigen::VectorXd& joints) {
  if (joints.size() != chain.dof()) {
    throw InvalidArgument("expected " + std::to_string(chain.dof()) + " joint values, got " +
                          std::to_string(joints.size()));
  }
}

}  // namespace

void check_joint_limits(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints) {
  const ArmChain& chain = model.arm(arm);
  check_size(chain, joints);
  for (int i = 0; i < chain.dof(); ++i) {
    const double q = joints[i];
    if (!std::isfinite(q) || q < chain.lower[i] || q > chain.upper[i]) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "joint '" << model.joints()[chain.joints[i]].name << "' value " << q << " outside limits ["
          << chain.lower[i] << ", " << chain.upper[i] << "]";
      throw InvalidArgument(msg.str());
    }
  }
}

RigidTransform forward_kinematics_unchecked(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints) {
  const ArmChain& chain = model.arm(arm);
  check_size(chain, joints);
  RigidTransform t = chain.mount_pose;
  for (const ChainSegment& seg : chain.segments) {
    t = t * seg.origin;
    if (seg.actuated >= 0) t = t * joint_motion(seg.type, seg.axis, joints[seg.actuated]);
  }
  return t;
}

RigidTransform forward_kinematics(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints) {
  check_joint_limits(model, arm, joints);
  return forward_kinematics_unchecked(model, arm, joints);
}

Jacobian arm_jacobian(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints) {
  const ArmChain& chain = model.arm(arm);
  check_size(chain, joints);
  std::vector<Eigen::Vector3d> axes(chain.dof());
  std::vector<Eigen::Vector3d> origins(chain.dof());
  RigidTransform t = chain.mount_pose;
  for (const ChainSegment& seg : chain.segments) {
    t = t * seg.origin;
    if (seg.actuated >= 0) {
      axes[seg.actuated] = t.rotate(seg.axis);
      origins[seg.actuated] = t.translation();
      t = t * joint_motion(seg.type, seg.axis, joints[seg.actuated]);
    }
  }
  const Eigen::Vector3d tip = t.translation();
  Jacobian jac(6, chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    const JointType type = model.joints()[chain.joints[i]].type;
    if (type == JointType::kRevolute) {
      jac.col(i).head<3>() = axes[i].cross(tip - origins[i]);
      jac.col(i).tail<3>() = axes[i];
    } else {
      jac.col(i).head<3>() = axes[i];
      jac.col(i).tail<3>().setZero();
    }
  }
  return jac;
}

Eigen::VectorXd arm_joints(const RobotModel& model, std::span<const double> config, Arm arm) {
  const ArmChain& chain = model.arm(arm);
  if (static_cast<int>(config.size()) != model.config_size()) {
    throw InvalidArgument("config has " + std::to_string(config.size()) + " channels, model expects " +
                          std::to_string(model.config_size()));
  }
  const int off = model.layout().arm_offset[static_cast<int>(arm)];
  Eigen::VectorXd q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) q[i] = config[off + i];
  return q;
}

void set_arm_joints(const RobotModel& model, std::span<double> config, Arm arm, const Eigen::VectorXd& joints) {
  const ArmChain& chain = model.arm(arm);
  check_size(chain, joints);
  const int off = model.layout().arm_offset[static_cast<int>(arm)];
  for (int i = 0; i < chain.dof(); ++i) config[off + i] = joints[i];
}

double gripper_value(const RobotModel& model, std::span<const double> config, Arm arm) {
  (void)model.arm(arm);
  return config[model.layout().gripper_offset[static_cast<int>(arm)]];
}

std::vector<RigidTransform> link_poses(const RobotModel& model, std::span<const double> config) {
  const auto& joints = model.joints();
  std::vector<double> values(joints.size(), 0.0);
  for (std::size_t j = 0; j < joints.size(); ++j) {
    if (joints[j].has_limits) values[j] = std::clamp(0.0, joints[j].lower, joints[j].upper);
  }
  for (Arm arm : kArms) {
    if (!model.has_arm(arm)) continue;
    const ArmChain& chain = model.arm(arm);
    const Eigen::VectorXd q = arm_joints(model, config, arm);
    check_joint_limits(model, arm, q);
    for (int i = 0; i < chain.dof(); ++i) values[chain.joints[i]] = q[i];
    const double g = gripper_value(model, config, arm);
    for (const auto& [j, mult] : chain.gripper) {
      double v = mult * g;
      if (joints[j].has_limits) v = std::clamp(v, joints[j].lower, joints[j].upper);
      values[j] = v;
    }
  }
  std::vector<RigidTransform> poses(model.links().size());
  poses[model.base_link()] = RigidTransform::identity();
  for (int j : model.traversal()) {
    const Joint& joint = joints[j];
    poses[joint.child] = poses[joint.parent] * joint.origin * joint_motion(joint.type, joint.axis, values[j]);
  }
  return poses;
}

std::map<std::string, RigidTransform> link_pose_map(const RobotModel& model, std::span<const double> config) {
  const auto poses = link_poses(model, config);
  std::map<std::string, RigidTransform> out;
  for (std::size_t i = 0; i < poses.size(); ++i) out.emplace(model.links()[i].name, poses[i]);
  return out;
}

}  // namespace egodemo
