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

#include "egodemo/retarget.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "egodemo/kinematics.hpp"
#include "egodemo/parallel.hpp"
#include "egodemo/random.hpp"

namespace egodemo {

using nlohmann::json;

void RetargetOptions::validate() const {
  schedule.validate();
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw InvalidArgument("smoothing window must be a positive odd integer");
  }
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
    throw InvalidArgument("max failure fraction must lie in [0, 1]");
  }
}

std::vector<double> median_filter(std::span<const double> values, int window) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("median window must be a positive odd integer");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
  std::vector<double> out(values.begin(), values.end());
  std::vector<double> buf;
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::ptrdiff_t half = std::min<std::ptrdiff_t>({window / 2, t, n - 1 - t});
    buf.assign(values.begin() + (t - half), values.begin() + (t + half + 1));
    std::nth_element(buf.begin(), buf.begin() + half, buf.end());
    out[t] = buf[half];
  }
  return out;
}

void interpolate_fill(std::vector<Eigen::VectorXd>& values, const std::vector<bool>& ok) {
  if (values.size() != ok.size()) throw InvalidArgument("fill mask size mismatch");
  std::vector<std::size_t> anchors;
  for (std::size_t t = 0; t < ok.size(); ++t)
    if (ok[t]) anchors.push_back(t);
  if (anchors.empty()) throw NumericalError("no converged frames to interpolate from");
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (ok[t]) continue;
    auto hi = std::upper_bound(anchors.begin(), anchors.end(), t);
    if (hi == anchors.begin()) {
      values[t] = values[*hi];
    } else if (hi == anchors.end()) {
      values[t] = values[anchors.back()];
    } else {
      const std::size_t a = *(hi - 1);
      const std::size_t b = *hi;
      const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
      values[t] = values[a] + w * (values[b] - values[a]);
    }
  }
}

namespace {

struct ArmSolution {
  std::vector<Eigen::VectorXd> joints;
  std::vector<FrameArmStatus> status;
  std::vector<RigidTransform> targets;
  std::size_t failed = 0;
  std::size_t smoothing_rejected = 0;
};

ArmSolution solve_arm(const RobotModel& model, const JointTrajectory& trajectory, Arm arm,
                      const RigidTransform& base_transform, const RetargetOptions& options, std::uint64_t seed) {
  const std::size_t frames = trajectory.size();
  ArmSolution sol;
  sol.joints.resize(frames);
  sol.status.resize(frames);
  sol.targets.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    sol.targets[t] = base_transform * forward_kinematics(model, arm, arm_joints(model, trajectory.frame(t), arm));
  }

  const Eigen::VectorXd first = arm_joints(model, trajectory.frame(0), arm);
  auto solve_frame = [&](std::size_t t, const Eigen::VectorXd& init) {
    const IkResult r = solve_ik(model, arm, sol.targets[t], init, options.schedule,
                                derive_seed(seed, {static_cast<std::uint64_t>(arm), t}));
    sol.joints[t] = r.joints;
    sol.status[t] = {r.status, r.stage, r.position_error, r.orientation_error};
  };
  if (options.warm_start) {
    Eigen::VectorXd init = first;
    for (std::size_t t = 0; t < frames; ++t) {
      solve_frame(t, init);
      if (sol.status[t].status == IkStatus::kConverged) init = sol.joints[t];
    }
  } else {
    parallel_for(frames, options.jobs, [&](std::size_t t) { solve_frame(t, first); });
  }

  std::vector<bool> ok(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    ok[t] = sol.status[t].status == IkStatus::kConverged;
    if (!ok[t]) ++sol.failed;
  }

  // Median smoothing over the converged subsequence. A filtered value is kept
  // only if the frame still meets the tolerance it converged at.
  if (options.smoothing_window > 1) {
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < frames; ++t)
      if (ok[t]) idx.push_back(t);
    const int dof = model.arm(arm).dof();
    std::vector<Eigen::VectorXd> filtered(idx.size(), Eigen::VectorXd(dof));
    std::vector<double> channel(idx.size());
    for (int j = 0; j < dof; ++j) {
      for (std::size_t i = 0; i < idx.size(); ++i) channel[i] = sol.joints[idx[i]][j];
      const auto smooth = median_filter(channel, options.smoothing_window);
      for (std::size_t i = 0; i < idx.size(); ++i) filtered[i][j] = smooth[i];
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t t = idx[i];
      if (filtered[i] == sol.joints[t]) continue;
      const IkStage& stage = options.schedule.stages[sol.status[t].stage];
      const PoseError e = pose_error(sol.targets[t], forward_kinematics_unchecked(model, arm, filtered[i]));
      if (e.position <= stage.position_tolerance && e.orientation <= stage.orientation_tolerance) {
        sol.joints[t] = filtered[i];
      } else {
        ++sol.smoothing_rejected;
      }
    }
  }

  if (sol.failed > 0 && sol.failed < frames) {
    interpolate_fill(sol.joints, ok);
    for (std::size_t t = 0; t < frames; ++t)
      if (!ok[t]) sol.status[t].status = IkStatus::kFilled;
  }

  for (std::size_t t = 0; t < frames; ++t) {
    const PoseError e = pose_error(sol.targets[t], forward_kinematics_unchecked(model, arm, sol.joints[t]));
    sol.status[t].position_error = e.position;
    sol.status[t].orientation_error = e.orientation;
  }
  return sol;
}

const char* status_name(IkStatus s) {
  switch (s) {
    case IkStatus::kConverged:
      return "converged";
    case IkStatus::kFilled:
      return "filled";
    case IkStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

}  // namespace

std::pair<JointTrajectory, RetargetReport> retarget_trajectory(const RobotModel& model,
                                                               const JointTrajectory& trajectory,
                                                               const EgoMotion& motion,
                                                               const RetargetOptions& options, std::uint64_t seed) {
  options.validate();
  validate_trajectory(model, trajectory);
  const RigidTransform base_transform = ego_motion_to_base_transform(motion);

  std::array<ArmSolution, 2> solutions;
  std::vector<Arm> arms;
  for (Arm arm : kArms)
    if (model.has_arm(arm)) arms.push_back(arm);
  RetargetOptions inner = options;
  inner.jobs = std::max(1, resolve_jobs(options.jobs) / static_cast<int>(arms.size()));
  parallel_for(arms.size(), options.jobs, [&](std::size_t i) {
    solutions[static_cast<int>(arms[i])] = solve_arm(model, trajectory, arms[i], base_transform, inner, seed);
  });

  const std::size_t frames = trajectory.size();
  RetargetReport report;
  report.frames = frames;
  double pos_sum = 0.0;
  double rot_sum = 0.0;
  std::size_t count = 0;
  bool too_many = false;
  std::string detail;
  for (Arm arm : arms) {
    const int a = static_cast<int>(arm);
    const ArmSolution& sol = solutions[a];
    report.arms[a] = sol.status;
    report.failed[a] = sol.failed;
    report.smoothing_rejected += sol.smoothing_rejected;
    for (const auto& s : sol.status) {
      if (s.status == IkStatus::kFilled) ++report.filled;
      report.max_position_error = std::max(report.max_position_error, s.position_error);
      report.max_orientation_error = std::max(report.max_orientation_error, s.orientation_error);
      pos_sum += s.position_error;
      rot_sum += s.orientation_error;
      ++count;
    }
    if (sol.failed == frames ||
        static_cast<double>(sol.failed) > options.max_failure_fraction * static_cast<double>(frames)) {
      too_many = true;
      detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(arm)) + " arm IK failed on " +
                std::to_string(sol.failed) + "/" + std::to_string(frames) + " frames";
    }
  }
  if (count > 0) {
    report.mean_position_error = pos_sum / static_cast<double>(count);
    report.mean_orientation_error = rot_sum / static_cast<double>(count);
  }
  if (too_many) throw RetargetError("retargeting failed: " + detail, report);

  JointTrajectory out = trajectory;
  for (Arm arm : arms) {
    for (std::size_t t = 0; t < frames; ++t) {
      set_arm_joints(model, out.frame(t), arm, solutions[static_cast<int>(arm)].joints[t]);
    }
  }
  return {std::move(out), std::move(report)};
}

std::string RetargetReport::to_json() const {
  json j;
  j["frames"] = frames;
  j["filled"] = filled;
  j["smoothing_rejected"] = smoothing_rejected;
  j["max_position_error"] = max_position_error;
  j["mean_position_error"] = mean_position_error;
  j["max_orientation_error"] = max_orientation_error;
  j["mean_orientation_error"] = mean_orientation_error;
  for (Arm arm : kArms) {
    const int a = static_cast<int>(arm);
    if (arms[a].empty()) continue;
    json per = json::array();
    for (const auto& s : arms[a]) {
      per.push_back({{"status", status_name(s.status)},
                     {"stage", s.stage},
                     {"position_error", s.position_error},
                     {"orientation_error", s.orientation_error}});
    }
    j["arms"][std::string(to_string(arm))] = {{"failed", failed[a]}, {"frames", per}};
  }
  return j.dump(2) + "\n";
}

ReplayReport replay_consistency_check(const RobotModel& model, const JointTrajectory& original,
                                      const JointTrajectory& retargeted, const EgoMotion& motion,
                                      const ReplayThresholds& thresholds) {
  if (original.size() != retargeted.size()) {
    throw InvalidArgument("trajectory length mismatch: original " + std::to_string(original.size()) +
                          " frames, retargeted " + std::to_string(retargeted.size()));
  }
  if (original.channels() != retargeted.channels()) throw InvalidArgument("trajectory channel mismatch");
  const RigidTransform base_transform = ego_motion_to_base_transform(motion);
  ReplayReport r;
  r.thresholds = thresholds;
  r.frames.resize(original.size());
  for (std::size_t t = 0; t < original.size(); ++t) {
    bool ok = true;
    for (Arm arm : kArms) {
      if (!model.has_arm(arm)) continue;
      const RigidTransform expected =
          base_transform * forward_kinematics(model, arm, arm_joints(model, original.frame(t), arm));
      const RigidTransform actual = forward_kinematics(model, arm, arm_joints(model, retargeted.frame(t), arm));
      const PoseError e = pose_error(expected, actual);
      r.frames[t][static_cast<int>(arm)] = e;
      r.max_position_error = std::max(r.max_position_error, e.position);
      r.max_orientation_error = std::max(r.max_orientation_error, e.orientation);
      ok = ok && e.position <= thresholds.position && e.orientation <= thresholds.orientation;
    }
    if (ok) ++r.within;
  }
  r.fraction_within = original.size() == 0 ? 0.0 : static_cast<double>(r.within) / original.size();
  return r;
}

std::string ReplayReport::to_json() const {
  json j;
  j["position_threshold"] = thresholds.position;
  j["orientation_threshold"] = thresholds.orientation;
  j["frames"] = frames.size();
  j["within"] = within;
  j["fraction_within"] = fraction_within;
  j["max_position_error"] = max_position_error;
  j["max_orientation_error"] = max_orientation_error;
  json per = json::array();
  for (const auto& f : frames) {
    per.push_back({{"left_position", f[0].position},
                   {"left_orientation", f[0].orientation},
                   {"right_position", f[1].position},
                   {"right_orientation", f[1].orientation}});
  }
  j["per_frame"] = per;
  return j.dump(2) + "\n";
}

}  // namespace egodemo
