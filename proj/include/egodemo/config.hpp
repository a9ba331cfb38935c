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
#include <string>

#include "egodemo/geometry.hpp"
#include "egodemo/ik.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/retarget.hpp"

namespace egodemo {

// Knobs shared by the pipeline stages.
struct PipelineConfig {
  RetargetOptions retarget;
  int dilation_radius = 2;  // px, robot mask dilation before reprojection
  RenderOptions render;
  // Worker threads. Never part of the echoed config: outputs do not depend
  // on it.
  int jobs = 1;

  void validate() const;
  // Effective config as compact JSON (jobs excluded).
  std::string to_json() const;
};

// A named operating point: image size, viewpoint sampling range and
// pipeline defaults.
struct Profile {
  std::string name;
  int width = 320;
  int height = 240;
  ViewpointRange range;
  PipelineConfig pipeline;
};

// Built-in profiles: "sim" (240x320, dx, dy in [-0.1, 0.1] m, dtheta in
// [-10, 10] deg) and "real" (480x640, dx in [-0.1, 0] m).
Profile builtin_profile(const std::string& name);

// Profile document (JSON). Every key is optional and overrides the profile
// named by "base" (default "sim"):
//   { "base": "sim", "name": "...", "width": 320, "height": 240,
//     "range": { "dx": [lo, hi], "dy": [lo, hi], "dtheta_deg": [lo, hi] },
//     "dilation_radius": 2, "supersample": 1,
//     "retarget": { "smoothing_window": 5, "max_failure_fraction": 0.5,
//                   "warm_start": true, "schedule": <schedule document> } }
Profile profile_from_json(const std::string& text, const std::string& source = "<profile>");
// A built-in name, or a path to a profile document.
Profile resolve_profile(const std::string& name_or_path);

// IK schedule document (JSON):
//   { "stages": [ { "position_tolerance_m", "orientation_tolerance_rad",
//                   "max_iterations" }, ... ],
//     "restarts": 5,
//     "damping": { "initial", "increase", "decrease", "min", "max" },
//     "joint_mask": [false, ...] }
// Missing keys keep the defaults.
IkSchedule schedule_from_json(const std::string& text, const std::string& source = "<schedule>");
IkSchedule load_schedule(const std::filesystem::path& path);
std::string schedule_to_json(const IkSchedule& schedule);

}  // namespace egodemo
