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
#include <string>

#include <Eigen/Core>

#include "egodemo/episode.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/robot_model.hpp"
#include "egodemo/trajectory.hpp"

namespace egodemo {

// Synthetic demonstrations for tests, demos and the acceptance suite.

// A reaching pose for 6-joint arms (the shipped dual-arm fixture), both
// arms turned towards the middle; zeros clamped into the limits otherwise. Grippers half open.
std::vector<double> home_configuration(const RobotModel& model);

// Smooth joint motion around `home`: every arm joint follows
// home + amplitude * sin(2 pi f t / (T - 1) + phase) with seeded f in
// [0.5, 1.5] and phase, kept inside the limits. Grippers open and close.
// Timestamps advance at 30 Hz.
JointTrajectory synthetic_trajectory(const RobotModel& model, std::size_t frames, std::uint64_t seed,
                                     double amplitude = 0.25);

// Ray-cast table-top scene seen by `camera`: a checkered table top 0.25 m
// below the base origin, two boxes on it and a back wall. Depth in stored
// units; pixels that hit nothing are invalid.
RgbdFrame tabletop_scene(const CameraModel& camera);

// Scene plus the rendered robot (nearer surface wins) for every frame, with
// the robot's visible pixels as robot masks.
Episode make_synthetic_episode(const RobotModel& model, const CameraModel& camera, const JointTrajectory& trajectory,
                               const std::string& id, const std::string& robot_config = "");

// Fronto-parallel plane at camera depth `distance` with a smooth colour
// texture; every pixel valid.
RgbdFrame textured_plane_frame(const CameraModel& camera, double distance);

}  // namespace egodemo
