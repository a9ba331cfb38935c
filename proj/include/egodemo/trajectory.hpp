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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "egodemo/robot_model.hpp"

namespace egodemo {

// Time-indexed joint + gripper sequence. For the dual-arm robot each frame
// is [L arm (6), L gripper, R arm (6), R gripper].
class JointTrajectory {
 public:
  static constexpr int kDualArmChannels = 14;

  explicit JointTrajectory(int channels = kDualArmChannels);

  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return values_.size() / channels_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> frame(std::size_t t) const {
    return {values_.data() + t * channels_, static_cast<std::size_t>(channels_)};
  }
  std::span<double> frame(std::size_t t) {
    return {values_.data() + t * channels_, static_cast<std::size_t>(channels_)};
  }

  void push_back(std::span<const double> frame);
  void push_back(std::span<const double> frame, double timestamp);

  bool has_timestamps() const noexcept { return !timestamps_.empty(); }
  const std::vector<double>& timestamps() const noexcept { return timestamps_; }
  void set_timestamps(std::vector<double> timestamps);

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const JointTrajectory&, const JointTrajectory&) = default;

 private:
  int channels_;
  std::vector<double> values_;
  std::vector<double> timestamps_;
};

// Checks T >= 1, finite values, channel count, and arm joints within limits.
// Violations are reported with the frame index.
void validate_trajectory(const RobotModel& model, const JointTrajectory& trajectory);

// Plain-text table: a header row naming the channels (left_joint1..N,
// left_gripper, right_joint1..N, right_gripper, optional timestamp), then one
// row per frame. Columns are matched by header name on load; values are
// written with 17 significant digits so they round-trip exactly.
std::string trajectory_to_csv(const JointTrajectory& trajectory);
JointTrajectory trajectory_from_csv(const std::string& text, const std::string& source = "<csv>");
void save_trajectory(const JointTrajectory& trajectory, const std::filesystem::path& path);
JointTrajectory load_trajectory(const std::filesystem::path& path);

}  // namespace egodemo
