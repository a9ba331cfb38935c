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

#include "egodemo/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "egodemo/checksum.hpp"
#include "egodemo/error.hpp"
#include "egodemo/imageops.hpp"
#include "egodemo/parallel.hpp"
#include "egodemo/png_io.hpp"
#include "egodemo/random.hpp"
#include "egodemo/reprojection.hpp"
#include "egodemo/output_dir.hpp"

namespace egodemo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

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
}

json checksums(const fs::path& root, const std::string& skip) {
  std::map<std::string, std::string> sums;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root).generic_string();
    if (rel != skip) sums[rel] = sha256_file(entry.path());
  }
  return sums;
}

void verify_checksums(const fs::path& root, const json& sums) {
  for (const auto& [rel, sum] : sums.items()) {
    const fs::path file = root / fs::path(rel);
    if (!fs::exists(file)) throw DataError(root.string() + ": missing file " + rel);
    if (sha256_file(file) != sum.get<std::string>()) throw DataError(root.string() + ": checksum mismatch for " + rel);
  }
}

json motion_json(const EgoMotion& m) { return {{"dx", m.dx}, {"dy", m.dy}, {"dtheta_rad", m.dtheta}}; }

EgoMotion motion_from(const json& j) {
  return {j.at("dx").get<double>(), j.at("dy").get<double>(), j.at("dtheta_rad").get<double>()};
}

void write_rgb_dir(const fs::path& dir, const std::vector<RgbImage>& frames) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < frames.size(); ++t) write_png_rgb(dir / frame_file_name(t), frames[t]);
}

std::vector<RgbImage> read_rgb_dir(const fs::path& dir, std::size_t count) {
  std::vector<RgbImage> out(count);
  for (std::size_t t = 0; t < count; ++t) out[t] = read_png_rgb(dir / frame_file_name(t));
  return out;
}

DepthImage quantise_depth(const FloatImage& depth, double scale) {
  DepthImage out(depth.width(), depth.height(), 1);
  for (std::size_t i = 0; i < depth.data().size(); ++i) {
    const double z = depth.data()[i];
    if (std::isfinite(z)) out.data()[i] = static_cast<std::uint16_t>(std::clamp(std::round(z / scale), 1.0, 65535.0));
  }
  return out;
}

void write_robot_dirs(const fs::path& dir, const std::vector<RenderedRobotFrame>& frames, double depth_scale) {
  for (const char* role : {"rgb", "mask", "depth"}) fs::create_directories(dir / role);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::string name = frame_file_name(t);
    write_png_rgb(dir / "rgb" / name, frames[t].rgb);
    write_png_mask(dir / "mask" / name, frames[t].mask);
    write_png_gray16(dir / "depth" / name, quantise_depth(frames[t].depth, depth_scale));
  }
}

std::vector<RenderedRobotFrame> read_robot_dirs(const fs::path& dir, std::size_t count, double depth_scale) {
  std::vector<RenderedRobotFrame> out(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::string name = frame_file_name(t);
    RenderedRobotFrame& f = out[t];
    f.rgb = read_png_rgb(dir / "rgb" / name);
    f.mask = read_png_mask(dir / "mask" / name);
    const DepthImage d = read_png_gray16(dir / "depth" / name);
    f.depth = FloatImage(d.width(), d.height(), 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < d.data().size(); ++i) {
      if (d.data()[i] != 0) f.depth.data()[i] = d.data()[i] * depth_scale;
    }
  }
  return out;
}

template <typename F>
auto with_json_errors(const fs::path& where, F&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(where.string() + ": " + e.what());
  }
}

}  // namespace

void save_bundle(const ConditioningBundle& bundle, const fs::path& dir) {
  if (bundle.scene.size() != bundle.robot.size()) {
    throw InvalidArgument("bundle has " + std::to_string(bundle.scene.size()) + " scene frames and " +
                          std::to_string(bundle.robot.size()) + " robot frames");
  }
  const fs::path tmp = staging_dir_for(dir);
  try {
    write_rgb_dir(tmp / "scene", bundle.scene);
    write_robot_dirs(tmp / "robot", bundle.robot, bundle.camera.depth_scale());
    save_camera(bundle.camera, tmp / "camera.json");
    json j;
    j["format_version"] = kBundleFormatVersion;
    j["episode_id"] = bundle.episode_id;
    j["motion"] = motion_json(bundle.motion);
    j["frame_count"] = bundle.scene.size();
    j["sha256"] = checksums(tmp, "bundle.json");
    write_text(tmp / "bundle.json", j.dump(2) + "\n");
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  commit_staging_dir(tmp, dir, "bundle.json");
}

ConditioningBundle load_bundle(const fs::path& dir) {
  const fs::path manifest = dir / "bundle.json";
  if (!fs::exists(manifest)) throw DataError("not a bundle directory (no bundle.json): " + dir.string());
  return with_json_errors(manifest, [&] {
    const json j = json::parse(read_text(manifest));
    const int version = j.at("format_version").get<int>();
    if (version != kBundleFormatVersion) {
      throw DataError(manifest.string() + ": format version " + std::to_string(version) + ", expected " +
                      std::to_string(kBundleFormatVersion));
    }
    verify_checksums(dir, j.at("sha256"));
    ConditioningBundle b;
    b.episode_id = j.at("episode_id").get<std::string>();
    b.motion = motion_from(j.at("motion"));
    b.camera = load_camera(dir / "camera.json");
    const std::size_t n = j.at("frame_count").get<std::size_t>();
    b.scene = read_rgb_dir(dir / "scene", n);
    b.robot = read_robot_dirs(dir / "robot", n, b.camera.depth_scale());
    return b;
  });
}

NovelEpisode generate_novel_episode(const Episode& source, const RobotModel& model, const EgoMotion& motion,
                                    const PipelineConfig& config, std::uint64_t seed, const std::string& new_id) {
  source.validate();
  config.validate();
  if (!source.has_depth()) throw DataError("episode '" + source.id + "' has no depth maps");

  RetargetOptions options = config.retarget;
  options.jobs = config.jobs;
  auto [trajectory, report] = retarget_trajectory(model, source.trajectory, motion, options, seed);

  const CameraModel& camera = source.camera;
  const RigidTransform relative = camera_relative_transform(camera, motion);
  const RobotRenderer renderer(model, config.render);
  const std::size_t n = source.frames.size();

  NovelEpisode out;
  out.report = std::move(report);
  Episode& ep = out.episode;
  ep.id = new_id;
  ep.camera = camera;
  ep.trajectory = trajectory;
  ep.frames.resize(n);
  ep.robot_masks.resize(n);
  ep.robot_config = source.robot_config;
  ep.provenance = {EpisodeKind::kGenerated, source.id, motion, seed, ""};
  ep.config_json = config.to_json();
  ep.wrist_dir = source.wrist_dir;

  ConditioningBundle& bundle = out.bundle;
  bundle.episode_id = new_id;
  bundle.motion = motion;
  bundle.camera = camera;
  bundle.scene.resize(n);
  bundle.robot.resize(n);

  parallel_for(n, config.jobs, [&](std::size_t t) {
    const RenderedRobotFrame original = renderer.render(source.trajectory.frame(t), camera);
    const RgbdFrame aligned = align_depth_to_rgb(source.frames[t], camera);
    const RgbdFrame scene_only = apply_mask_with_dilation(aligned, original.mask, config.dilation_radius);
    const RgbdFrame novel = reproject_frame(scene_only, camera, relative);
    if (novel.valid_count() == 0) {
      throw DataError("frame " + std::to_string(t) + ": no scene pixels survive reprojection");
    }
    const RgbdFrame filled = hole_fill(novel);
    RenderedRobotFrame robot = renderer.render(trajectory.frame(t), camera);

    RgbdFrame& f = ep.frames[t];
    f.rgb = naive_compose(filled, robot);
    f.validity = novel.validity;
    for (std::size_t i = 0; i < f.validity.data().size(); ++i) {
      if (robot.mask.data()[i]) f.validity.data()[i] = 1;
    }
    ep.robot_masks[t] = robot.mask;
    bundle.scene[t] = filled.rgb;
    bundle.robot[t] = std::move(robot);
  });
  return out;
}

void save_repaired_video(const RepairedVideo& video, const fs::path& dir) {
  const fs::path tmp = staging_dir_for(dir);
  try {
    write_rgb_dir(tmp, video.frames);
    write_text(tmp / "repair.json", json{{"model", video.model}, {"frame_count", video.frames.size()}}.dump(2) + "\n");
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  commit_staging_dir(tmp, dir, "repair.json");
}

RepairedVideo load_repaired_video(const fs::path& dir) {
  const fs::path manifest = dir / "repair.json";
  if (!fs::exists(manifest)) throw DataError("repaired video directory has no repair.json: " + dir.string());
  return with_json_errors(manifest, [&] {
    const json j = json::parse(read_text(manifest));
    RepairedVideo v;
    v.model = j.at("model").get<std::string>();
    std::size_t n = 0;
    while (fs::exists(dir / frame_file_name(n))) ++n;
    if (j.contains("frame_count") && j.at("frame_count").get<std::size_t>() != n) {
      throw DataError(dir.string() + ": repair.json lists " + std::to_string(j.at("frame_count").get<std::size_t>()) +
                      " frames but " + std::to_string(n) + " are present");
    }
    v.frames = read_rgb_dir(dir, n);
    return v;
  });
}

RepairedVideo identity_repair(const ConditioningBundle& bundle) {
  RepairedVideo v;
  v.model = "identity";
  v.frames.resize(bundle.scene.size());
  for (std::size_t t = 0; t < bundle.scene.size(); ++t) v.frames[t] = naive_compose(bundle.scene[t], bundle.robot[t]);
  return v;
}

Episode attach_repaired_video(const Episode& episode, const RepairedVideo& repaired) {
  episode.validate();
  if (repaired.frames.size() != episode.frames.size()) {
    throw DataError("repaired video has " + std::to_string(repaired.frames.size()) + " frames, episode '" +
                    episode.id + "' has " + std::to_string(episode.frames.size()));
  }
  bool identical = true;
  for (std::size_t t = 0; t < repaired.frames.size(); ++t) {
    const RgbImage& r = repaired.frames[t];
    if (!r.same_shape(episode.frames[t].rgb)) {
      throw DataError("repaired frame " + std::to_string(t) + " is " + std::to_string(r.width()) + "x" +
                      std::to_string(r.height()) + ", episode frames are " + std::to_string(episode.camera.width) +
                      "x" + std::to_string(episode.camera.height));
    }
    identical = identical && r == episode.frames[t].rgb;
  }
  Episode out = episode;
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    out.frames[t].rgb = repaired.frames[t];
    out.frames[t].validity = make_mask(out.camera.width, out.camera.height, true);
  }
  out.provenance.repair = identical ? "identity" : repaired.model;
  return out;
}

std::vector<TrainingPair> make_training_pairs(const Episode& episode, const RobotModel& model,
                                              const ViewpointRange& range, std::size_t count, std::uint64_t seed,
                                              const PipelineConfig& config) {
  episode.validate();
  config.validate();
  range.validate();
  if (count == 0) return {};
  if (!episode.has_depth()) throw DataError("episode '" + episode.id + "' has no depth maps");

  const CameraModel& camera = episode.camera;
  const RobotRenderer renderer(model, config.render);
  const std::size_t n = episode.frames.size();

  // The source-view robot render and scene cut are shared by every pair.
  std::vector<RenderedRobotFrame> robot(n);
  std::vector<RgbdFrame> scene_only(n);
  std::vector<MaskImage> cut(n);
  parallel_for(n, config.jobs, [&](std::size_t t) {
    robot[t] = renderer.render(episode.trajectory.frame(t), camera);
    const RgbdFrame aligned = align_depth_to_rgb(episode.frames[t], camera);
    scene_only[t] = apply_mask_with_dilation(aligned, robot[t].mask, config.dilation_radius);
    cut[t] = dilate_disc(robot[t].mask, config.dilation_radius);
  });

  std::vector<TrainingPair> pairs(count);
  for (std::size_t k = 0; k < count; ++k) {
    TrainingPair& p = pairs[k];
    p.motion = sample_ego_motion(range, derive_seed(seed, {k}));
    p.scene.resize(n);
    p.robot = robot;
    p.target.resize(n);
    parallel_for(n, config.jobs, [&](std::size_t t) {
      RgbdFrame back = double_reproject(scene_only[t], camera, p.motion);
      back = apply_mask_with_dilation(back, cut[t], 0);
      if (back.valid_count() == 0) {
        throw DataError("frame " + std::to_string(t) + ": no scene pixels survive double reprojection");
      }
      p.scene[t] = hole_fill(back).rgb;
      p.target[t] = episode.frames[t].rgb;
    });
  }
  return pairs;
}

void save_training_pair(const TrainingPair& pair, const CameraModel& camera, const std::string& source_id,
                        const fs::path& dir) {
  const fs::path tmp = staging_dir_for(dir);
  try {
    write_rgb_dir(tmp / "scene", pair.scene);
    write_robot_dirs(tmp / "robot", pair.robot, camera.depth_scale());
    write_rgb_dir(tmp / "target", pair.target);
    save_camera(camera, tmp / "camera.json");
    json j;
    j["format_version"] = kBundleFormatVersion;
    j["source_episode"] = source_id;
    j["motion"] = motion_json(pair.motion);
    j["frame_count"] = pair.target.size();
    j["sha256"] = checksums(tmp, "pair.json");
    write_text(tmp / "pair.json", j.dump(2) + "\n");
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  commit_staging_dir(tmp, dir, "pair.json");
}

void save_rgb_frames(const std::vector<RgbImage>& frames, const fs::path& dir) { write_rgb_dir(dir, frames); }

std::vector<RgbImage> load_rgb_frames(const fs::path& dir, std::size_t count) { return read_rgb_dir(dir, count); }

std::size_t count_frames(const fs::path& dir) {
  std::size_t n = 0;
  while (fs::exists(dir / frame_file_name(n))) ++n;
  return n;
}

void save_robot_frames(const std::vector<RenderedRobotFrame>& frames, const fs::path& dir, double depth_scale) {
  write_robot_dirs(dir, frames, depth_scale);
}

}  // namespace egodemo
