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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "egodemo/config.hpp"
#include "egodemo/episode.hpp"
#include "egodemo/error.hpp"
#include "egodemo/imageops.hpp"
#include "egodemo/metrics.hpp"
#include "egodemo/mixing.hpp"
#include "egodemo/output_dir.hpp"
#include "egodemo/parallel.hpp"
#include "egodemo/pipeline.hpp"
#include "egodemo/png_io.hpp"
#include "egodemo/reprojection.hpp"
#include "egodemo/retarget.hpp"
#include "egodemo/synthetic.hpp"

namespace egodemo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

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

// Builds an output directory in a staging area and moves it into place.
template <typename F>
void write_output_dir(const fs::path& dir, const std::string& marker, F&& fill) {
  const fs::path tmp = staging_dir_for(dir);
  try {
    fill(tmp);
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  commit_staging_dir(tmp, dir, marker);
}

// Single output file, written next to its final name and renamed.
void write_output_file(const fs::path& path, const std::string& text) {
  if (fs::is_directory(path)) throw IoError(path.string() + " is a directory");
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  write_text(tmp, text);
  fs::rename(tmp, path);
}

json motion_json(const EgoMotion& m) {
  return {{"dx", m.dx}, {"dy", m.dy}, {"dtheta_rad", m.dtheta}, {"dtheta_deg", rad_to_deg(m.dtheta)}};
}

json range_json(const ViewpointRange& r) {
  return {{"dx", {r.dx.lower, r.dx.upper}},
          {"dy", {r.dy.lower, r.dy.upper}},
          {"dtheta_deg", {rad_to_deg(r.dtheta.lower), rad_to_deg(r.dtheta.upper)}}};
}

std::string fixed(double v, int digits = 4) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Flags shared by the commands that run pipeline stages.
struct Shared {
  std::string profile = "sim";
  std::string robot;
  int jobs = 1;
  std::optional<int> smoothing_window;
  std::optional<int> dilation_radius;
  std::optional<int> supersample;
  std::optional<double> max_failure_fraction;
  bool no_warm_start = false;
  std::string schedule;
};

void add_profile_flags(CLI::App* app, Shared& s) {
  app->add_option("--profile", s.profile, "built-in profile (sim, real) or a profile file")->capture_default_str();
  app->add_option("--jobs", s.jobs, "worker threads, 0 = all cores")->capture_default_str();
  app->add_option("--robot", s.robot, "robot config file; overrides the one named by the episode");
  app->add_option("--smoothing-window", s.smoothing_window, "median window for retargeted joints (odd)");
  app->add_option("--max-failure-fraction", s.max_failure_fraction, "tolerated IK failure fraction per arm");
  app->add_flag("--no-warm-start", s.no_warm_start, "start every frame's IK from the first frame's joints");
  app->add_option("--schedule", s.schedule, "IK schedule file");
  app->add_option("--dilation-radius", s.dilation_radius, "robot mask dilation in pixels");
  app->add_option("--supersample", s.supersample, "robot render supersampling factor");
}

// Flags > profile > built-in defaults.
Profile effective_profile(const Shared& s) {
  Profile p = resolve_profile(s.profile);
  PipelineConfig& c = p.pipeline;
  if (s.smoothing_window) c.retarget.smoothing_window = *s.smoothing_window;
  if (s.max_failure_fraction) c.retarget.max_failure_fraction = *s.max_failure_fraction;
  if (s.no_warm_start) c.retarget.warm_start = false;
  if (!s.schedule.empty()) c.retarget.schedule = load_schedule(s.schedule);
  if (s.dilation_radius) c.dilation_radius = *s.dilation_radius;
  if (s.supersample) c.render.supersample = *s.supersample;
  if (s.jobs < 0) throw UsageError("--jobs must be >= 0");
  c.jobs = s.jobs;
  c.validate();
  return p;
}

struct MotionFlags {
  std::optional<double> dx;
  std::optional<double> dy;
  std::optional<double> dtheta_deg;
  bool allow_outside = false;

  bool any() const { return dx || dy || dtheta_deg; }
  EgoMotion motion() const { return {dx.value_or(0.0), dy.value_or(0.0), deg_to_rad(dtheta_deg.value_or(0.0))}; }
};

void add_motion_flags(CLI::App* app, MotionFlags& m) {
  app->add_option("--dx", m.dx, "base displacement along x, m");
  app->add_option("--dy", m.dy, "base displacement along y, m");
  app->add_option("--dtheta-deg", m.dtheta_deg, "base yaw, degrees");
  app->add_flag("--allow-outside-range", m.allow_outside, "accept motions outside the profile range");
}

void check_in_range(const EgoMotion& m, const Profile& p, bool allow) {
  if (allow) return;
  auto check = [&](const char* name, double v, const Interval& iv, double scale, const char* unit) {
    const double eps = 1e-9;
    if (v * scale < iv.lower * scale - eps || v * scale > iv.upper * scale + eps) {
      throw UsageError(std::string("motion ") + name + " = " + fixed(v * scale, 6) + " " + unit + " is outside the '" +
                       p.name + "' range [" + fixed(iv.lower * scale, 6) + ", " + fixed(iv.upper * scale, 6) +
                       "] (use --allow-outside-range)");
    }
  };
  check("dx", m.dx, p.range.dx, 1.0, "m");
  check("dy", m.dy, p.range.dy, 1.0, "m");
  check("dtheta", m.dtheta, p.range.dtheta, rad_to_deg(1.0), "deg");
}

// "dx,dy,dtheta_deg"
EgoMotion parse_motion_triple(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--motion expects dx,dy,dtheta_deg, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--motion expects dx,dy,dtheta_deg, got '" + text + "'");
  return {v[0], v[1], deg_to_rad(v[2])};
}

// Episode-relative robot config paths are tried after the working directory.
fs::path robot_config_path(const Shared& s, const Episode& ep, const fs::path& ep_dir) {
  if (!s.robot.empty()) return s.robot;
  if (ep.robot_config.empty()) throw UsageError("episode '" + ep.id + "' names no robot config; pass --robot");
  const fs::path p = ep.robot_config;
  if (p.is_absolute() || fs::exists(p)) return p;
  if (fs::exists(ep_dir / p)) return ep_dir / p;
  throw DataError("robot config '" + ep.robot_config + "' named by episode '" + ep.id + "' not found");
}

// Accepts an episode directory or a `generate` output directory.
fs::path episode_dir(const fs::path& dir) {
  if (fs::exists(dir / "generate.json") && fs::exists(dir / "episode" / "episode.json")) return dir / "episode";
  return dir;
}

fs::path bundle_dir(const fs::path& dir) {
  if (fs::exists(dir / "generate.json") && fs::exists(dir / "bundle" / "bundle.json")) return dir / "bundle";
  return dir;
}

// RGB frames of an episode, a generate output, a repaired video or a plain
// frame directory.
std::vector<RgbImage> load_video(const fs::path& dir) {
  const fs::path ep = episode_dir(dir);
  if (fs::exists(ep / "episode.json")) {
    Episode e = load_episode(ep);
    std::vector<RgbImage> frames;
    for (auto& f : e.frames) frames.push_back(std::move(f.rgb));
    return frames;
  }
  if (fs::exists(dir / "repair.json")) return load_repaired_video(dir).frames;
  const std::size_t n = count_frames(dir);
  if (n == 0) throw DataError("no frames (000000.png ...) in " + dir.string());
  return load_rgb_frames(dir, n);
}

std::vector<std::string> list_episodes(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    if (fs::exists(episode_dir(entry.path()) / "episode.json")) {
      names.push_back((root / entry.path().filename()).generic_string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

// ---------------------------------------------------------------------------

struct RetargetCmd {
  std::string episode;
  std::string out;
  std::uint64_t seed = 0;
  MotionFlags motion;
};

int run_retarget(const RetargetCmd& c, const Shared& s, std::ostream& out) {
  const Profile p = effective_profile(s);
  const EgoMotion m = c.motion.motion();
  check_in_range(m, p, c.motion.allow_outside);
  const Episode ep = load_episode(c.episode);
  const RobotModel model = load_robot_model(robot_config_path(s, ep, c.episode));
  RetargetOptions o = p.pipeline.retarget;
  o.jobs = p.pipeline.jobs;
  auto [traj, report] = retarget_trajectory(model, ep.trajectory, m, o, c.seed);
  write_output_dir(c.out, "report.json", [&](const fs::path& tmp) {
    save_trajectory(traj, tmp / "trajectory.csv");
    json j;
    j["source_episode"] = ep.id;
    j["motion"] = motion_json(m);
    j["seed"] = c.seed;
    j["config"] = json::parse(p.pipeline.to_json());
    j["report"] = json::parse(report.to_json());
    write_text(tmp / "report.json", j.dump(2) + "\n");
  });
  out << "retargeted " << report.frames << " frames of '" << ep.id << "': filled " << report.filled
      << ", max position error " << fixed(report.max_position_error, 6) << " m, max orientation error "
      << fixed(report.max_orientation_error, 6) << " rad\n";
  return kExitOk;
}

struct ReprojectCmd {
  std::string episode;
  std::string out;
  bool keep_robot = false;
  bool fill = false;
  MotionFlags motion;
};

int run_reproject(const ReprojectCmd& c, const Shared& s, std::ostream& out) {
  const Profile p = effective_profile(s);
  const EgoMotion m = c.motion.motion();
  check_in_range(m, p, c.motion.allow_outside);
  const Episode ep = load_episode(c.episode);
  if (!ep.has_depth()) throw DataError("episode '" + ep.id + "' has no depth maps");
  const CameraModel& camera = ep.camera;
  std::optional<RobotModel> model;
  if (!c.keep_robot) model.emplace(load_robot_model(robot_config_path(s, ep, c.episode)));
  std::optional<RobotRenderer> renderer;
  if (model) renderer.emplace(*model, p.pipeline.render);
  const RigidTransform relative = camera_relative_transform(camera, m);

  const std::size_t n = ep.frames.size();
  std::vector<RgbdFrame> frames(n);
  parallel_for(n, p.pipeline.jobs, [&](std::size_t t) {
    RgbdFrame scene = align_depth_to_rgb(ep.frames[t], camera);
    if (renderer) {
      const RenderedRobotFrame robot = renderer->render(ep.trajectory.frame(t), camera);
      scene = apply_mask_with_dilation(scene, robot.mask, p.pipeline.dilation_radius);
    }
    RgbdFrame novel = reproject_frame(scene, camera, relative);
    if (c.fill && novel.valid_count() > 0) {
      RgbdFrame filled = hole_fill(novel);
      filled.validity = novel.validity;
      novel = std::move(filled);
    }
    frames[t] = std::move(novel);
  });

  json valid = json::array();
  write_output_dir(c.out, "reproject.json", [&](const fs::path& tmp) {
    for (const char* role : {"rgb", "depth", "validity"}) fs::create_directories(tmp / role);
    for (std::size_t t = 0; t < n; ++t) {
      const std::string name = frame_file_name(t);
      write_png_rgb(tmp / "rgb" / name, frames[t].rgb);
      write_png_gray16(tmp / "depth" / name, frames[t].depth);
      write_png_mask(tmp / "validity" / name, frames[t].validity);
      valid.push_back(static_cast<double>(frames[t].valid_count()) / static_cast<double>(frames[t].rgb.pixel_count()));
    }
    save_camera(camera, tmp / "camera.json");
    json j;
    j["source_episode"] = ep.id;
    j["motion"] = motion_json(m);
    j["frame_count"] = n;
    j["robot_removed"] = !c.keep_robot;
    j["hole_filled"] = c.fill;
    j["config"] = json::parse(p.pipeline.to_json());
    j["valid_fraction"] = valid;
    write_text(tmp / "reproject.json", j.dump(2) + "\n");
  });
  out << "reprojected " << n << " frames of '" << ep.id << "'\n";
  return kExitOk;
}

struct RenderCmd {
  std::string episode;
  std::string trajectory;
  std::string out;
};

int run_render(const RenderCmd& c, const Shared& s, std::ostream& out) {
  const Profile p = effective_profile(s);
  const Episode ep = load_episode(c.episode);
  const RobotModel model = load_robot_model(robot_config_path(s, ep, c.episode));
  const JointTrajectory traj = c.trajectory.empty() ? ep.trajectory : load_trajectory(c.trajectory);
  const auto frames = render_robot_video(model, traj, ep.camera, p.pipeline.render, p.pipeline.jobs);
  write_output_dir(c.out, "render.json", [&](const fs::path& tmp) {
    save_robot_frames(frames, tmp, ep.camera.depth_scale());
    save_camera(ep.camera, tmp / "camera.json");
    json j;
    j["source_episode"] = ep.id;
    j["trajectory"] = c.trajectory.empty() ? std::string("episode") : c.trajectory;
    j["frame_count"] = frames.size();
    j["config"] = json::parse(p.pipeline.to_json());
    write_text(tmp / "render.json", j.dump(2) + "\n");
  });
  out << "rendered " << frames.size() << " robot frames\n";
  return kExitOk;
}

struct GenerateCmd {
  std::string episode;
  std::string out;
  std::string motion;
  bool sample = false;
  std::string range;
  std::uint64_t seed = 0;
  std::string id;
  bool allow_outside = false;
};

int run_generate(const GenerateCmd& c, const Shared& s, std::ostream& out) {
  const Profile p = effective_profile(s);
  if (c.motion.empty() == !c.sample) throw UsageError("generate needs exactly one of --motion or --sample");
  EgoMotion m;
  std::optional<Profile> range;
  if (c.sample) {
    range = c.range.empty() ? p : resolve_profile(c.range);
    m = sample_ego_motion(range->range, c.seed);
  } else {
    m = parse_motion_triple(c.motion);
    check_in_range(m, p, c.allow_outside);
  }
  const Episode ep = load_episode(c.episode);
  const fs::path robot = robot_config_path(s, ep, c.episode);
  const RobotModel model = load_robot_model(robot);
  const std::string id = c.id.empty() ? ep.id + "_novel_s" + std::to_string(c.seed) : c.id;
  NovelEpisode r = generate_novel_episode(ep, model, m, p.pipeline, c.seed, id);
  r.episode.robot_config = robot.generic_string();
  write_output_dir(c.out, "generate.json", [&](const fs::path& tmp) {
    save_episode(r.episode, tmp / "episode");
    save_bundle(r.bundle, tmp / "bundle");
    json j;
    j["source_episode"] = ep.id;
    j["episode_id"] = id;
    j["motion"] = motion_json(m);
    j["seed"] = c.seed;
    j["sampled"] = c.sample;
    if (range) j["range"] = range_json(range->range);
    j["config"] = json::parse(p.pipeline.to_json());
    j["retarget"] = json::parse(r.report.to_json());
    write_text(tmp / "generate.json", j.dump(2) + "\n");
  });
  out << "generated '" << id << "' (" << r.episode.frame_count() << " frames) at dx=" << fixed(m.dx, 6)
      << " dy=" << fixed(m.dy, 6) << " dtheta=" << fixed(rad_to_deg(m.dtheta), 6) << " deg\n";
  return kExitOk;
}

struct PairsCmd {
  std::string episode;
  std::string out;
  std::string range;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

int run_pairs(const PairsCmd& c, const Shared& s, std::ostream& out) {
  const Profile p = effective_profile(s);
  const Profile range = c.range.empty() ? p : resolve_profile(c.range);
  const Episode ep = load_episode(c.episode);
  const RobotModel model = load_robot_model(robot_config_path(s, ep, c.episode));
  const auto pairs = make_training_pairs(ep, model, range.range, c.count, c.seed, p.pipeline);
  write_output_dir(c.out, "pairs.json", [&](const fs::path& tmp) {
    json motions = json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "pair_%06zu", k);
      save_training_pair(pairs[k], ep.camera, ep.id, tmp / name);
      motions.push_back(motion_json(pairs[k].motion));
    }
    json j;
    j["source_episode"] = ep.id;
    j["count"] = pairs.size();
    j["seed"] = c.seed;
    j["range"] = range_json(range.range);
    j["motions"] = motions;
    j["config"] = json::parse(p.pipeline.to_json());
    write_text(tmp / "pairs.json", j.dump(2) + "\n");
  });
  out << "wrote " << pairs.size() << " training pairs for '" << ep.id << "'\n";
  return kExitOk;
}

struct AttachCmd {
  std::string episode;
  std::string repaired;
  std::string out;
};

int run_attach(const AttachCmd& c, std::ostream& out) {
  const Episode ep = load_episode(episode_dir(c.episode));
  const Episode done = attach_repaired_video(ep, load_repaired_video(c.repaired));
  save_episode(done, c.out);
  out << "attached repaired video to '" << done.id << "' (repair: " << done.provenance.repair << ")\n";
  return kExitOk;
}

struct RepairCmd {
  std::string bundle;
  std::string out;
};

int run_repair_identity(const RepairCmd& c, std::ostream& out) {
  const RepairedVideo v = identity_repair(load_bundle(bundle_dir(c.bundle)));
  save_repaired_video(v, c.out);
  out << "wrote " << v.frames.size() << " identity-repaired frames\n";
  return kExitOk;
}

struct MixCmd {
  std::string standard;
  std::string generated;
  std::string ratio;
  std::uint64_t seed = 0;
  std::string out;
};

int run_mix(const MixCmd& c, std::ostream& out) {
  MixRatio ratio;
  try {
    ratio = MixRatio::parse(c.ratio);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto standard = list_episodes(c.standard);
  const auto generated = c.generated.empty() ? std::vector<std::string>{} : list_episodes(c.generated);
  const MixManifest m = mix_datasets(standard, generated, ratio, c.seed);
  validate_manifest(m);
  write_output_file(c.out, m.to_json());
  out << "mixed " << m.count(MixGroup::kStandard) << " standard + " << m.count(MixGroup::kGenerated)
      << " generated episodes at " << m.ratio << "\n";
  return kExitOk;
}

struct EvalCmd {
  std::string pred;
  std::string ref;
  std::string out;
};

int run_eval(const EvalCmd& c, const Shared& s, std::ostream& out) {
  if (s.jobs < 0) throw UsageError("--jobs must be >= 0");
  const auto pred = load_video(c.pred);
  const auto ref = load_video(c.ref);
  if (pred.size() != ref.size()) {
    throw DataError("prediction has " + std::to_string(pred.size()) + " frames, reference has " +
                    std::to_string(ref.size()));
  }
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (!pred[t].same_shape(ref[t])) throw DataError("frame " + std::to_string(t) + " sizes differ");
  }
  const VideoMetrics vm = video_metrics(pred, ref, s.jobs);
  const std::string text = json::parse(vm.to_json()).dump(2) + "\n";
  if (!c.out.empty()) write_output_file(c.out, text);
  out << text;
  return kExitOk;
}

struct ReplayCmd {
  std::string original;
  std::string retargeted;
  std::string out;
  double position_tol = ReplayThresholds{}.position;
  double orientation_tol = ReplayThresholds{}.orientation;
  std::optional<double> require_fraction;
  MotionFlags motion;
};

int run_replay(const ReplayCmd& c, const Shared& s, std::ostream& out) {
  const Episode original = load_episode(episode_dir(c.original));
  const RobotModel model = load_robot_model(robot_config_path(s, original, c.original));
  JointTrajectory traj;
  std::optional<EgoMotion> recorded;
  const fs::path dir = c.retargeted;
  if (fs::exists(dir / "report.json") && fs::exists(dir / "trajectory.csv")) {
    traj = load_trajectory(dir / "trajectory.csv");
    try {
      const json j = json::parse(read_text(dir / "report.json"));
      const json& mj = j.at("motion");
      recorded = EgoMotion{mj.at("dx").get<double>(), mj.at("dy").get<double>(), mj.at("dtheta_rad").get<double>()};
    } catch (const json::exception& e) {
      throw DataError((dir / "report.json").string() + ": " + e.what());
    }
  } else {
    const Episode ep = load_episode(episode_dir(dir));
    traj = ep.trajectory;
    recorded = ep.provenance.motion;
  }
  EgoMotion m;
  if (c.motion.any()) {
    m = c.motion.motion();
  } else if (recorded) {
    m = *recorded;
  } else {
    throw UsageError("no motion recorded with " + dir.string() + "; pass --dx/--dy/--dtheta-deg");
  }
  const ReplayReport r = replay_consistency_check(model, original.trajectory, traj, m, {c.position_tol, c.orientation_tol});
  json j = json::parse(r.to_json());
  j["motion"] = motion_json(m);
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) write_output_file(c.out, text);
  out << text;
  if (c.require_fraction && r.fraction_within < *c.require_fraction) {
    throw NumericalError("only " + fixed(100.0 * r.fraction_within, 2) + "% of frames within thresholds, " +
                         fixed(100.0 * *c.require_fraction, 2) + "% required");
  }
  return kExitOk;
}

struct FixtureCmd {
  std::string camera;
  std::string out;
  std::string id = "fixture";
  std::size_t frames = 30;
  std::uint64_t seed = 0;
  double amplitude = 0.25;
};

int run_fixture(const FixtureCmd& c, const Shared& s, std::ostream& out) {
  if (s.robot.empty()) throw UsageError("make-fixture needs --robot");
  if (c.frames == 0) throw UsageError("--frames must be positive");
  const RobotModel model = load_robot_model(s.robot);
  const CameraModel camera = load_camera(c.camera);
  const JointTrajectory traj = synthetic_trajectory(model, c.frames, c.seed, c.amplitude);
  // Absolute, so the episode can be used from any working directory.
  const std::string robot = fs::absolute(s.robot).lexically_normal().generic_string();
  const Episode ep = make_synthetic_episode(model, camera, traj, c.id, robot);
  save_episode(ep, c.out);
  out << "wrote synthetic episode '" << c.id << "' (" << c.frames << " frames)\n";
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Novel egocentric viewpoint demonstrations from single-view robot episodes"};
  app.name("egodemo");
  app.require_subcommand(1);
  Shared shared;

  RetargetCmd retarget;
  auto* retarget_app = app.add_subcommand("retarget", "retarget an episode's joint trajectory to a displaced base");
  retarget_app->add_option("--episode", retarget.episode, "source episode directory")->required();
  retarget_app->add_option("--out", retarget.out, "output directory")->required();
  retarget_app->add_option("--seed", retarget.seed, "seed for IK restarts")->capture_default_str();
  add_motion_flags(retarget_app, retarget.motion);
  add_profile_flags(retarget_app, shared);

  ReprojectCmd reproject;
  auto* reproject_app = app.add_subcommand("reproject", "reproject an episode's scene to a displaced viewpoint");
  reproject_app->add_option("--episode", reproject.episode, "source episode directory")->required();
  reproject_app->add_option("--out", reproject.out, "output directory")->required();
  reproject_app->add_flag("--keep-robot", reproject.keep_robot, "reproject the robot pixels too");
  reproject_app->add_flag("--fill", reproject.fill, "hole-fill the result (validity still marks real content)");
  add_motion_flags(reproject_app, reproject.motion);
  add_profile_flags(reproject_app, shared);

  RenderCmd render;
  auto* render_app = app.add_subcommand("render-robot", "render robot-only rgb, mask and depth videos");
  render_app->add_option("--episode", render.episode, "episode directory (camera, default trajectory)")->required();
  render_app->add_option("--trajectory", render.trajectory, "trajectory file to render instead");
  render_app->add_option("--out", render.out, "output directory")->required();
  add_profile_flags(render_app, shared);

  GenerateCmd generate;
  auto* generate_app = app.add_subcommand("generate", "novel-view episode and conditioning bundle");
  generate_app->add_option("--episode", generate.episode, "source episode directory")->required();
  generate_app->add_option("--out", generate.out, "output directory (episode/, bundle/, generate.json)")->required();
  generate_app->add_option("--motion", generate.motion, "dx,dy,dtheta_deg");
  generate_app->add_flag("--sample", generate.sample, "sample the motion from --range");
  generate_app->add_option("--range", generate.range, "profile whose range is sampled (default --profile)");
  generate_app->add_option("--seed", generate.seed, "seed for sampling and IK")->capture_default_str();
  generate_app->add_option("--id", generate.id, "id of the new episode");
  generate_app->add_flag("--allow-outside-range", generate.allow_outside, "accept motions outside the profile range");
  add_profile_flags(generate_app, shared);

  PairsCmd pairs;
  auto* pairs_app = app.add_subcommand("make-pairs", "double-reprojection training pairs");
  pairs_app->add_option("--episode", pairs.episode, "source episode directory")->required();
  pairs_app->add_option("--out", pairs.out, "output directory")->required();
  pairs_app->add_option("--range", pairs.range, "profile whose range is sampled (default --profile)");
  pairs_app->add_option("--count", pairs.count, "number of pairs")->capture_default_str();
  pairs_app->add_option("--seed", pairs.seed, "seed for motion sampling")->capture_default_str();
  add_profile_flags(pairs_app, shared);

  AttachCmd attach;
  auto* attach_app = app.add_subcommand("attach", "replace a generated episode's video with the repaired one");
  attach_app->add_option("--episode", attach.episode, "generated episode (or generate output) directory")->required();
  attach_app->add_option("--repaired", attach.repaired, "repaired video directory")->required();
  attach_app->add_option("--out", attach.out, "output episode directory")->required();

  RepairCmd repair;
  auto* repair_app = app.add_subcommand("repair-identity", "stand-in repair model: naive composition of a bundle");
  repair_app->add_option("--bundle", repair.bundle, "bundle (or generate output) directory")->required();
  repair_app->add_option("--out", repair.out, "output directory")->required();

  MixCmd mix;
  auto* mix_app = app.add_subcommand("mix", "mix standard and generated episodes at a ratio");
  mix_app->add_option("--standard", mix.standard, "directory of standard episodes")->required();
  mix_app->add_option("--generated", mix.generated, "directory of generated episodes");
  mix_app->add_option("--ratio", mix.ratio, "standard:generated, e.g. 1:0.5")->required();
  mix_app->add_option("--seed", mix.seed, "selection seed")->capture_default_str();
  mix_app->add_option("--out", mix.out, "manifest file")->required();

  EvalCmd eval;
  auto* eval_app = app.add_subcommand("eval-video", "PSNR and SSIM of a video against a reference");
  eval_app->add_option("--pred", eval.pred, "predicted video")->required();
  eval_app->add_option("--ref", eval.ref, "reference video")->required();
  eval_app->add_option("--out", eval.out, "also write the report here");
  eval_app->add_option("--jobs", shared.jobs, "worker threads, 0 = all cores")->capture_default_str();

  ReplayCmd replay;
  auto* replay_app = app.add_subcommand("replay-check", "end-effector consistency of a retargeted trajectory");
  replay_app->add_option("--original", replay.original, "source episode directory")->required();
  replay_app->add_option("--retargeted", replay.retargeted, "retarget output, generate output or episode")->required();
  replay_app->add_option("--out", replay.out, "also write the report here");
  replay_app->add_option("--position-tol", replay.position_tol, "m")->capture_default_str();
  replay_app->add_option("--orientation-tol", replay.orientation_tol, "rad")->capture_default_str();
  replay_app->add_option("--require-fraction", replay.require_fraction, "fail unless this fraction is within");
  replay_app->add_option("--robot", shared.robot, "robot config file");
  add_motion_flags(replay_app, replay.motion);

  FixtureCmd fixture;
  auto* fixture_app = app.add_subcommand("make-fixture", "synthetic table-top episode");
  fixture_app->add_option("--robot", shared.robot, "robot config file")->required();
  fixture_app->add_option("--camera", fixture.camera, "camera calibration file")->required();
  fixture_app->add_option("--out", fixture.out, "output episode directory")->required();
  fixture_app->add_option("--id", fixture.id, "episode id")->capture_default_str();
  fixture_app->add_option("--frames", fixture.frames, "frame count")->capture_default_str();
  fixture_app->add_option("--seed", fixture.seed, "trajectory seed")->capture_default_str();
  fixture_app->add_option("--amplitude", fixture.amplitude, "joint motion amplitude, rad")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    if (*retarget_app) return run_retarget(retarget, shared, out);
    if (*reproject_app) return run_reproject(reproject, shared, out);
    if (*render_app) return run_render(render, shared, out);
    if (*generate_app) return run_generate(generate, shared, out);
    if (*pairs_app) return run_pairs(pairs, shared, out);
    if (*attach_app) return run_attach(attach, out);
    if (*repair_app) return run_repair_identity(repair, out);
    if (*mix_app) return run_mix(mix, out);
    if (*eval_app) return run_eval(eval, shared, out);
    if (*replay_app) return run_replay(replay, shared, out);
    if (*fixture_app) return run_fixture(fixture, shared, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    switch (e.kind()) {
      case ErrorKind::kInvalidArgument:
        return kExitUsage;
      case ErrorKind::kNumerical:
        return kExitNumerical;
      case ErrorKind::kData:
      case ErrorKind::kIo:
        return kExitData;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  err << "error: usage: no command given\n";
  return kExitUsage;
}

}  // namespace egodemo::cli
