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

#include "egodemo/episode.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "egodemo/checksum.hpp"
#include "egodemo/error.hpp"
#include "egodemo/png_io.hpp"
#include "egodemo/output_dir.hpp"

namespace egodemo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(EpisodeKind kind) {
  switch (kind) {
    case EpisodeKind::kSource:
      return "source";
    case EpisodeKind::kGenerated:
      return "generated";
    case EpisodeKind::kDoubleReprojected:
      return "double_reprojected";
  }
  return "unknown";
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", index);
  return buf;
}

void Episode::validate() const {
  if (frames.empty()) throw DataError("episode '" + id + "' has no frames");
  if (trajectory.size() != frames.size()) {
    throw DataError("episode '" + id + "': trajectory has " + std::to_string(trajectory.size()) +
                    " frames but the video has " + std::to_string(frames.size()));
  }
  if (!robot_masks.empty() && robot_masks.size() != frames.size()) {
    throw DataError("episode '" + id + "': " + std::to_string(robot_masks.size()) + " robot masks for " +
                    std::to_string(frames.size()) + " frames");
  }
  const bool depth = has_depth();
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const RgbdFrame& f = frames[t];
    if (f.rgb.width() != camera.width || f.rgb.height() != camera.height || f.rgb.channels() != 3) {
      throw DataError("episode '" + id + "' frame " + std::to_string(t) + ": rgb is " +
                      std::to_string(f.rgb.width()) + "x" + std::to_string(f.rgb.height()) + ", camera is " +
                      std::to_string(camera.width) + "x" + std::to_string(camera.height));
    }
    if (!f.validity.same_size(f.rgb)) {
      throw DataError("episode '" + id + "' frame " + std::to_string(t) + ": validity size mismatch");
    }
    if (depth == f.depth.empty()) {
      throw DataError("episode '" + id + "' frame " + std::to_string(t) + ": depth present on some frames only");
    }
    if (!robot_masks.empty() && !robot_masks[t].same_size(f.rgb)) {
      throw DataError("episode '" + id + "' frame " + std::to_string(t) + ": robot mask size mismatch");
    }
  }
}

namespace {

json provenance_to_json(const Provenance& p) {
  json j;
  j["kind"] = std::string(to_string(p.kind));
  j["source_id"] = p.source_id;
  if (p.motion) j["motion"] = {{"dx", p.motion->dx}, {"dy", p.motion->dy}, {"dtheta_rad", p.motion->dtheta}};
  if (p.seed) j["seed"] = *p.seed;
  j["repair"] = p.repair;
  return j;
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "source") {
    p.kind = EpisodeKind::kSource;
  } else if (kind == "generated") {
    p.kind = EpisodeKind::kGenerated;
  } else if (kind == "double_reprojected") {
    p.kind = EpisodeKind::kDoubleReprojected;
  } else {
    throw DataError("unknown provenance kind '" + kind + "'");
  }
  p.source_id = j.value("source_id", "");
  if (j.contains("motion")) {
    const json& m = j.at("motion");
    p.motion = EgoMotion{m.at("dx").get<double>(), m.at("dy").get<double>(), m.at("dtheta_rad").get<double>()};
  }
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.repair = j.value("repair", "");
  return p;
}

std::map<std::string, std::string> checksum_tree(const fs::path& root, const std::string& skip) {
  std::map<std::string, std::string> sums;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root).generic_string();
    if (rel == skip) continue;
    sums[rel] = sha256_file(entry.path());
  }
  return sums;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

fs::path staging_dir_for(const fs::path& dir) {
  fs::path target = fs::absolute(dir).lexically_normal();
  if (target.filename().empty()) target = target.parent_path();
  if (fs::exists(target) && !fs::is_directory(target)) {
    throw IoError(target.string() + " exists and is not a directory");
  }
  fs::path staging = target;
  staging += ".partial";
  fs::remove_all(staging);
  fs::create_directories(staging);
  return staging;
}

void commit_staging_dir(const fs::path& staging, const fs::path& dir, const std::string& marker) {
  fs::path target = fs::absolute(dir).lexically_normal();
  if (target.filename().empty()) target = target.parent_path();
  if (fs::exists(target)) {
    if (!fs::is_empty(target) && !fs::exists(target / marker)) {
      fs::remove_all(staging);
      throw IoError("refusing to overwrite " + target.string() + ": not empty and has no " + marker);
    }
    fs::remove_all(target);
  }
  if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
  fs::rename(staging, target);
}

void save_episode(const Episode& episode, const fs::path& dir) {
  episode.validate();
  const fs::path tmp = staging_dir_for(dir);
  try {
    save_camera(episode.camera, tmp / "camera.json");
    save_trajectory(episode.trajectory, tmp / "trajectory.csv");
    for (const char* role : {"rgb", "validity"}) fs::create_directories(tmp / "frames" / role);
    if (episode.has_depth()) fs::create_directories(tmp / "frames" / "depth");
    if (!episode.robot_masks.empty()) fs::create_directories(tmp / "frames" / "robot_mask");
    for (std::size_t t = 0; t < episode.frames.size(); ++t) {
      const std::string name = frame_file_name(t);
      const RgbdFrame& f = episode.frames[t];
      write_png_rgb(tmp / "frames" / "rgb" / name, f.rgb);
      write_png_mask(tmp / "frames" / "validity" / name, f.validity);
      if (episode.has_depth()) write_png_gray16(tmp / "frames" / "depth" / name, f.depth);
      if (!episode.robot_masks.empty()) write_png_mask(tmp / "frames" / "robot_mask" / name, episode.robot_masks[t]);
    }
    if (episode.wrist_dir) {
      if (!fs::is_directory(*episode.wrist_dir)) {
        throw DataError("wrist directory " + episode.wrist_dir->string() + " does not exist");
      }
      fs::copy(*episode.wrist_dir, tmp / "wrist", fs::copy_options::recursive);
    }

    json j;
    j["schema_version"] = kEpisodeSchemaVersion;
    j["id"] = episode.id;
    j["frame_count"] = episode.frames.size();
    j["has_depth"] = episode.has_depth();
    j["has_robot_mask"] = !episode.robot_masks.empty();
    j["robot_config"] = episode.robot_config;
    j["provenance"] = provenance_to_json(episode.provenance);
    j["config"] = json::parse(episode.config_json);
    j["sha256"] = checksum_tree(tmp, "episode.json");
    write_text(tmp / "episode.json", j.dump(2) + "\n");
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  commit_staging_dir(tmp, dir, "episode.json");
}

Episode load_episode(const fs::path& dir) {
  const fs::path manifest = dir / "episode.json";
  if (!fs::exists(manifest)) throw DataError("not an episode directory (no episode.json): " + dir.string());
  json j;
  try {
    j = json::parse(read_text(manifest));
  } catch (const json::parse_error& e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  Episode ep;
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kEpisodeSchemaVersion) {
      throw DataError(manifest.string() + ": schema version " + std::to_string(version) + ", expected " +
                      std::to_string(kEpisodeSchemaVersion));
    }
    for (const auto& [rel, sum] : j.at("sha256").items()) {
      const fs::path file = dir / fs::path(rel);
      if (!fs::exists(file)) throw DataError(dir.string() + ": missing file " + rel);
      if (sha256_file(file) != sum.get<std::string>()) throw DataError(dir.string() + ": checksum mismatch for " + rel);
    }
    ep.id = j.at("id").get<std::string>();
    if (!fs::exists(dir / "camera.json")) throw DataError(dir.string() + ": missing calibration camera.json");
    ep.camera = load_camera(dir / "camera.json");
    ep.trajectory = load_trajectory(dir / "trajectory.csv");
    const std::size_t count = j.at("frame_count").get<std::size_t>();
    if (ep.trajectory.size() != count) {
      throw DataError(dir.string() + ": trajectory has " + std::to_string(ep.trajectory.size()) +
                      " frames but frame_count is " + std::to_string(count));
    }
    const bool depth = j.value("has_depth", false);
    const bool masks = j.value("has_robot_mask", false);
    ep.frames.resize(count);
    if (masks) ep.robot_masks.resize(count);
    for (std::size_t t = 0; t < count; ++t) {
      const std::string name = frame_file_name(t);
      RgbdFrame& f = ep.frames[t];
      f.rgb = read_png_rgb(dir / "frames" / "rgb" / name);
      const fs::path validity = dir / "frames" / "validity" / name;
      f.validity = fs::exists(validity) ? read_png_mask(validity) : make_mask(f.rgb.width(), f.rgb.height(), true);
      if (depth) f.depth = read_png_gray16(dir / "frames" / "depth" / name);
      if (masks) ep.robot_masks[t] = read_png_mask(dir / "frames" / "robot_mask" / name);
    }
    if (fs::exists(dir / "frames" / "rgb" / frame_file_name(count))) {
      std::size_t n = count;
      while (fs::exists(dir / "frames" / "rgb" / frame_file_name(n))) ++n;
      throw DataError(dir.string() + ": trajectory has " + std::to_string(count) + " frames but the video has " +
                      std::to_string(n));
    }
    ep.robot_config = j.value("robot_config", "");
    ep.provenance = provenance_from_json(j.at("provenance"));
    ep.config_json = j.value("config", json::object()).dump();
    if (fs::is_directory(dir / "wrist")) ep.wrist_dir = dir / "wrist";
  } catch (const json::exception& e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  ep.validate();
  return ep;
}

}  // namespace egodemo
