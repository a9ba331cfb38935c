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
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "egodemo/geometry.hpp"
#include "egodemo/image.hpp"
#include "egodemo/random.hpp"
#include "egodemo/robot_model.hpp"

namespace egodemo::testing {

inline std::filesystem::path data_dir() { return EGODEMO_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return EGODEMO_FIXTURE_DIR; }
inline std::filesystem::path dual_arm_config() { return data_dir() / "robots" / "dual_arm" / "robot.json"; }
inline std::filesystem::path planar_config() { return data_dir() / "robots" / "planar" / "robot.json"; }
inline std::filesystem::path sim_camera_file() { return data_dir() / "robots" / "dual_arm" / "camera_sim.json"; }

inline const RobotModel& dual_arm() {
  static const RobotModel model = load_robot_model(dual_arm_config());
  return model;
}

inline const RobotModel& planar() {
  static const RobotModel model = load_robot_model(planar_config());
  return model;
}

inline const CameraModel& sim_camera() {
  static const CameraModel camera = load_camera(sim_camera_file());
  return camera;
}

// Deleted on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("egodemo_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline RgbImage random_rgb(int w, int h, Rng& rng) {
  RgbImage img = make_rgb(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

// Small pinhole camera with identity extrinsic.
inline CameraModel toy_camera(int w, int h, double f = 50.0) {
  CameraModel c;
  c.fx = f;
  c.fy = f;
  c.cx = (w - 1) / 2.0;
  c.cy = (h - 1) / 2.0;
  c.width = w;
  c.height = h;
  c.depth_unit_mm = 1.0;
  c.depth_max = 10.0;
  return c;
}

}  // namespace egodemo::testing
