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

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "egodemo/geometry.hpp"
#include "egodemo/robot_model.hpp"

namespace egodemo {

struct IkStage {
  double position_tolerance = 1e-3;     // m
  double orientation_tolerance = 1e-2;  // rad
  int max_iterations = 100;

  friend bool operator==(const IkStage&, const IkStage&) = default;
};

struct LmDamping {
  double initial = 1e-3;
  double increase = 10.0;
  double decrease = 10.0;
  double min = 1e-9;
  double max = 1e3;

  friend bool operator==(const LmDamping&, const LmDamping&) = default;
};

// Tolerance escalation schedule for the robust solver.
struct IkSchedule {
  std::vector<IkStage> stages;
  int restarts = 5;  // random restarts per stage after the initial guess fails
  LmDamping damping;
  // Per-joint freeze flags; frozen joints keep their init value. Empty = none.
  std::vector<bool> joint_mask;

  // (1e-3 m, 1e-2 rad, 100) -> (5e-3 m, 5e-2 rad, 100) -> (1e-2 m, 1e-1 rad, 200).
  static IkSchedule defaults();
  void validate() const;

  friend bool operator==(const IkSchedule&, const IkSchedule&) = default;
};

enum class IkStatus { kConverged, kFilled, kFailed };

struct IkResult {
  Eigen::VectorXd joints;
  IkStatus status = IkStatus::kFailed;
  int stage = -1;  // index of the converging stage, -1 otherwise
  double position_error = 0.0;
  double orientation_error = 0.0;
  int iterations = 0;

  friend bool operator==(const IkResult& a, const IkResult& b) {
    return a.joints.size() == b.joints.size() && a.joints == b.joints && a.status == b.status &&
           a.stage == b.stage && a.position_error == b.position_error &&
           a.orientation_error == b.orientation_error && a.iterations == b.iterations;
  }
};

// Damped least-squares (Levenberg-Marquardt) IK for one arm. The residual is
// [target position - current position; log(R_target * R_current^T)]. Each
// stage first refines from `init`, then from uniform random restarts inside
// the joint limits; stages are tried in order until one meets its
// tolerances. Failure is reported through the status, not an exception.
IkResult solve_ik(const RobotModel& model, Arm arm, const RigidTransform& target, const Eigen::VectorXd& init,
                  const IkSchedule& schedule, std::uint64_t seed);

}  // namespace egodemo
