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

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "egodemo/geometry.hpp"
#include "egodemo/robot_model.hpp"

namespace egodemo {

using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Throws InvalidArgument naming the joint when any value is outside limits.
void check_joint_limits(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints);

// End-effector pose in the robot base frame.
RigidTransform forward_kinematics(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints);
RigidTransform forward_kinematics_unchecked(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints);

// Geometric Jacobian of the end effector in the base frame. Rows 0-2 are
// linear velocity, rows 3-5 angular velocity.
Jacobian arm_jacobian(const RobotModel& model, Arm arm, const Eigen::VectorXd& joints);

// Pose of every link in the base frame, indexed like model.links(). The
// config follows model.layout(); gripper channels drive the coupled joints.
std::vector<RigidTransform> link_poses(const RobotModel& model, std::span<const double> config);
std::map<std::string, RigidTransform> link_pose_map(const RobotModel& model, std::span<const double> config);

// Config vector slicing helpers.
Eigen::VectorXd arm_joints(const RobotModel& model, std::span<const double> config, Arm arm);
void set_arm_joints(const RobotModel& model, std::span<double> config, Arm arm, const Eigen::VectorXd& joints);
double gripper_value(const RobotModel& model, std::span<const double> config, Arm arm);

}  // namespace egodemo
