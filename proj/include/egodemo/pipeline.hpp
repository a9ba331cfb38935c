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
#include <string>
#include <vector>

#include "egodemo/config.hpp"
#include "egodemo/episode.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/retarget.hpp"
#include "egodemo/robot_model.hpp"

namespace egodemo {

constexpr int kBundleFormatVersion = 1;

// Everything the external video repair model consumes for one episode: the
// hole-filled novel-view scene video and the robot-only video rendered from
// the retargeted trajectory.
struct ConditioningBundle {
  std::string episode_id;
  EgoMotion motion;
  CameraModel camera;
  std::vector<RgbImage> scene;
  std::vector<RenderedRobotFrame> robot;

  std::size_t frame_count() const noexcept { return scene.size(); }
};

// Directory layout:
//   bundle.json   format_version, episode_id, motion, frame_count, camera,
//                 sha256 of every other file (written last)
//   scene/NNNNNN.png        hole-filled scene frames
//   robot/rgb/NNNNNN.png    robot-only colour
//   robot/mask/NNNNNN.png   0/255
//   robot/depth/NNNNNN.png  16-bit, stored depth units, 0 where empty
void save_bundle(const ConditioningBundle& bundle, const std::filesystem::path& dir);
// Robot depth comes back quantised to the camera's depth unit.
ConditioningBundle load_bundle(const std::filesystem::path& dir);

struct NovelEpisode {
  Episode episode;
  ConditioningBundle bundle;
  RetargetReport report;
};

// Retargets the trajectory, reprojects the robot-free scene to the novel
// view, fills holes, renders the robot at the retargeted joints and
// composes both into a placeholder observation video.
NovelEpisode generate_novel_episode(const Episode& source, const RobotModel& model, const EgoMotion& motion,
                                    const PipelineConfig& config, std::uint64_t seed, const std::string& new_id);

// Repaired video exchange: a directory of NNNNNN.png frames plus
// repair.json ({"model": "<id>"}).
struct RepairedVideo {
  std::string model;
  std::vector<RgbImage> frames;
};
void save_repaired_video(const RepairedVideo& video, const std::filesystem::path& dir);
RepairedVideo load_repaired_video(const std::filesystem::path& dir);

// Stand-in for the repair model: returns the naive composition of the
// bundle's scene and robot videos, tagged "identity".
RepairedVideo identity_repair(const ConditioningBundle& bundle);

// Replaces the observation video. Provenance records "identity" when the
// frames equal the current ones, else the repair model id.
Episode attach_repaired_video(const Episode& episode, const RepairedVideo& repaired);

struct TrainingPair {
  EgoMotion motion;
  std::vector<RgbImage> scene;               // double-reprojected, robot cut, hole-filled
  std::vector<RenderedRobotFrame> robot;     // rendered from the original joints
  std::vector<RgbImage> target;              // source rgb, bit-exact
};

// Per pair: sample a motion from `range`, double-reproject every frame with
// the dilated robot region removed, fill holes, and pair with the source
// robot render and the source frames.
std::vector<TrainingPair> make_training_pairs(const Episode& episode, const RobotModel& model,
                                              const ViewpointRange& range, std::size_t count, std::uint64_t seed,
                                              const PipelineConfig& config);

// pair.json (motion, frame_count, source episode, checksums) plus scene/,
// robot/{rgb,mask,depth}/, target/ frame directories.
void save_training_pair(const TrainingPair& pair, const CameraModel& camera, const std::string& source_id,
                        const std::filesystem::path& dir);

// Frame directories of NNNNNN.png files.
void save_rgb_frames(const std::vector<RgbImage>& frames, const std::filesystem::path& dir);
std::vector<RgbImage> load_rgb_frames(const std::filesystem::path& dir, std::size_t count);
// Number of consecutive NNNNNN.png files starting at 000000.
std::size_t count_frames(const std::filesystem::path& dir);
// rgb/, mask/ and depth/ (16-bit, stored units, 0 where empty) subdirectories.
void save_robot_frames(const std::vector<RenderedRobotFrame>& frames, const std::filesystem::path& dir,
                       double depth_scale);

}  // namespace egodemo
