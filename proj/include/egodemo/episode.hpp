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
#include <optional>
#include <string>
#include <vector>

#include "egodemo/geometry.hpp"
#include "egodemo/image.hpp"
#include "egodemo/reprojection.hpp"
#include "egodemo/trajectory.hpp"

namespace egodemo {

constexpr int kEpisodeSchemaVersion = 1;

enum class EpisodeKind { kSource, kGenerated, kDoubleReprojected };
std::string_view to_string(EpisodeKind kind);

struct Provenance {
  EpisodeKind kind = EpisodeKind::kSource;
  std::string source_id;             // empty for source episodes
  std::optional<EgoMotion> motion;   // exact motion for derived episodes
  std::optional<std::uint64_t> seed;
  std::string repair;                // repair model id once attached

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// A demonstration. Per-frame depth is optional (generated episodes carry
// none); validity defaults to all-true when not stored.
struct Episode {
  std::string id;
  CameraModel camera;
  JointTrajectory trajectory;
  std::vector<RgbdFrame> frames;
  std::vector<MaskImage> robot_masks;  // empty or one per frame
  std::string robot_config;            // robot config path as given
  Provenance provenance;
  std::string config_json = "{}";      // effective pipeline config
  // Wrist-camera directory copied through unchanged, if any.
  std::optional<std::filesystem::path> wrist_dir;

  std::size_t frame_count() const noexcept { return frames.size(); }
  bool has_depth() const noexcept { return !frames.empty() && !frames.front().depth.empty(); }

  // Frame/trajectory counts, image sizes, mask count. Throws DataError.
  void validate() const;
};

// Directory layout:
//   episode.json       schema_version, id, frame_count, robot_config,
//                      provenance, config, sha256 of every other file
//   camera.json        calibration
//   trajectory.csv     one row per frame
//   frames/rgb/NNNNNN.png        8-bit RGB
//   frames/depth/NNNNNN.png      16-bit grey, stored depth units (optional)
//   frames/validity/NNNNNN.png   8-bit 0/255
//   frames/robot_mask/NNNNNN.png 8-bit 0/255 (optional)
//   wrist/...                    opaque, copied verbatim (optional)
// episode.json is written last and marks the directory complete. Existing
// content of `dir` is replaced.
void save_episode(const Episode& episode, const std::filesystem::path& dir);

// Verifies the schema version, every checksum and the frame/trajectory
// lengths.
Episode load_episode(const std::filesystem::path& dir);

std::string frame_file_name(std::size_t index);

}  // namespace egodemo
