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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "egodemo/geometry.hpp"

namespace egodemo {

enum class JointType { kRevolute, kPrismatic, kFixed };

enum class Arm { kLeft = 0, kRight = 1 };
constexpr std::array<Arm, 2> kArms{Arm::kLeft, Arm::kRight};
std::string_view to_string(Arm arm);

struct MeshFile {
  std::filesystem::path path;  // absolute after load
  Eigen::Vector3d scale = Eigen::Vector3d::Ones();
};
struct BoxShape {
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};
struct CylinderShape {
  double radius = 0.0;
  double length = 0.0;
};
struct SphereShape {
  double radius = 0.0;
};
using VisualGeometry = std::variant<MeshFile, BoxShape, CylinderShape, SphereShape>;

struct LinkVisual {
  RigidTransform origin;
  VisualGeometry geometry;
  std::optional<Eigen::Vector3d> color;  // linear RGB in [0, 1]
};

struct Link {
  std::string name;
  std::vector<LinkVisual> visuals;
};

struct Joint {
  std::string name;
  JointType type = JointType::kFixed;
  int parent = -1;  // link index
  int child = -1;   // link index
  RigidTransform origin;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  bool has_limits = false;
  double lower = 0.0;
  double upper = 0.0;
};

// Parsed URDF-subset document before arm assembly.
struct UrdfDocument {
  std::string name;
  std::vector<Link> links;
  std::vector<Joint> joints;
  std::vector<std::string> warnings;
};

// Parses links, joints, visuals and materials. Mesh paths are resolved
// relative to `base_dir`. Unsupported elements are skipped with a warning.
UrdfDocument parse_urdf(std::string_view xml, const std::string& source,
                        const std::filesystem::path& base_dir);

struct GripperCoupling {
  std::string joint;
  double multiplier = 1.0;  // joint value = multiplier * gripper channel
};

struct ArmDescription {
  std::string mount_link;
  std::string ee_link;
  std::vector<std::string> joints;  // actuated joints, mount to tip
  std::vector<GripperCoupling> gripper;
};

struct RobotDescription {
  std::string base_link;
  std::optional<ArmDescription> left;
  std::optional<ArmDescription> right;
};

// One step of an arm chain: a fixed origin followed by an optional motion.
struct ChainSegment {
  RigidTransform origin;
  JointType type = JointType::kFixed;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  int actuated = -1;  // index into ArmChain::joints, -1 for fixed segments
};

struct ArmChain {
  std::string mount_link;
  std::string ee_link;
  RigidTransform mount_pose;  // mount link in the base frame
  std::vector<int> joints;    // model joint indices, actuated order
  std::vector<ChainSegment> segments;
  std::vector<std::pair<int, double>> gripper;  // (joint index, multiplier)
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dof() const noexcept { return static_cast<int>(joints.size()); }
};

// Layout of a full configuration vector: for each present arm in (L, R)
// order, its actuated joints followed by one gripper channel.
struct ConfigLayout {
  std::array<int, 2> arm_offset{-1, -1};
  std::array<int, 2> gripper_offset{-1, -1};
  int size = 0;
};

class RobotModel {
 public:
  RobotModel(UrdfDocument doc, const RobotDescription& desc);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const std::vector<Joint>& joints() const noexcept { return joints_; }
  int base_link() const noexcept { return base_link_; }
  // Joint indices ordered parent-before-child from the base.
  const std::vector<int>& traversal() const noexcept { return traversal_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  int link_index(std::string_view name) const;  // throws if unknown
  int joint_index(std::string_view name) const;

  bool has_arm(Arm arm) const noexcept { return arms_[static_cast<int>(arm)].has_value(); }
  const ArmChain& arm(Arm arm) const;
  const ConfigLayout& layout() const noexcept { return layout_; }
  int config_size() const noexcept { return layout_.size; }

 private:
  ArmChain build_chain(const ArmDescription& desc, const std::string& side) const;

  std::string name_;
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  std::vector<int> parent_joint_;  // per link, -1 for root
  std::vector<int> traversal_;
  int base_link_ = -1;
  std::array<std::optional<ArmChain>, 2> arms_;
  ConfigLayout layout_;
  std::vector<std::string> warnings_;
};

RobotModel parse_robot_model(std::string_view urdf_xml, const RobotDescription& desc,
                             const std::string& source = "<urdf>",
                             const std::filesystem::path& base_dir = {});

// Robot config document (JSON):
//   { "urdf": "<path relative to this file>", "base_link": "...",
//     "arms": { "left":  { "mount_link", "ee_link", "joints": [...],
//                          "gripper": [{"joint", "multiplier"}] },
//               "right": { ... } } }
RobotModel load_robot_model(const std::filesystem::path& config_path);

}  // namespace egodemo
