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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "egodemo/error.hpp"
#include "egodemo/geometry.hpp"
#include "egodemo/ik.hpp"
#include "egodemo/robot_model.hpp"
#include "egodemo/trajectory.hpp"

namespace egodemo {

struct RetargetOptions {
  IkSchedule schedule = IkSchedule::defaults();
  int smoothing_window = 5;  // odd; 1 disables the median filter
  double max_failure_fraction = 0.5;
  // Initialise each frame from the last converged solution (falls back to
  // the first frame's joints). When false every frame starts from frame 0.
  bool warm_start = true;
  int jobs = 1;

  void validate() const;
};

struct FrameArmStatus {
  IkStatus status = IkStatus::kFailed;
  int stage = -1;
  double position_error = 0.0;     // final, against the displaced target
  double orientation_error = 0.0;  // final, against the displaced target
};

struct RetargetReport {
  std::size_t frames = 0;
  // Indexed by Arm; empty for an arm the robot does not have.
  std::array<std::vector<FrameArmStatus>, 2> arms;
  std::size_t filled = 0;
  std::array<std::size_t, 2> failed{0, 0};  // IK failures before fill
  std::size_t smoothing_rejected = 0;       // filtered values that broke tolerance
  double max_position_error = 0.0;
  double mean_position_error = 0.0;
  double max_orientation_error = 0.0;
  double mean_orientation_error = 0.0;

  std::string to_json() const;
};

class RetargetError : public NumericalError {
 public:
  RetargetError(const std::string& what, RetargetReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const RetargetReport& report() const noexcept { return report_; }

 private:
  RetargetReport report_;
};

// For each arm and frame: FK in the base frame, displace the pose by the
// ego-motion base transform, solve IK, then median-smooth converged frames,
// interpolate failed frames and copy grippers through. Throws RetargetError
// when more than max_failure_fraction of an arm's frames fail.
std::pair<JointTrajectory, RetargetReport> retarget_trajectory(const RobotModel& model,
                                                               const JointTrajectory& trajectory,
                                                               const EgoMotion& motion,
                                                               const RetargetOptions& options, std::uint64_t seed);

// Median filter with a centred window truncated symmetrically at the ends, so
// every output is one of the inputs in its window.
std::vector<double> median_filter(std::span<const double> values, int window);

// Replaces entries with ok[t] == false by linear interpolation between the
// nearest ok neighbours; leading/trailing gaps hold the nearest ok entry.
void interpolate_fill(std::vector<Eigen::VectorXd>& values, const std::vector<bool>& ok);

struct ReplayThresholds {
  double position = 5e-3;
  double orientation = 5e-2;
};

struct ReplayReport {
  ReplayThresholds thresholds;
  // Per frame, per arm pose error of FK(retargeted) against T_v * FK(original).
  std::vector<std::array<PoseError, 2>> frames;
  std::size_t within = 0;
  double fraction_within = 0.0;
  double max_position_error = 0.0;
  double max_orientation_error = 0.0;

  std::string to_json() const;
};

ReplayReport replay_consistency_check(const RobotModel& model, const JointTrajectory& original,
                                      const JointTrajectory& retargeted, const EgoMotion& motion,
                                      const ReplayThresholds& thresholds = {});

}  // namespace egodemo
