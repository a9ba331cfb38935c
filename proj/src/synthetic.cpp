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

#include "egodemo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "egodemo/error.hpp"
#include "egodemo/kinematics.hpp"
#include "egodemo/random.hpp"

namespace egodemo {

namespace {

constexpr double kTableZ = -0.25;

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

struct Box {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
  Eigen::Vector3d color;
};

void hit_box(const Box& b, const Eigen::Vector3d& o, const Eigen::Vector3d& d, Hit& best) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  int axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < b.lo[k] || o[k] > b.hi[k]) return;
      continue;
    }
    double a = (b.lo[k] - o[k]) / d[k];
    double c = (b.hi[k] - o[k]) / d[k];
    if (a > c) std::swap(a, c);
    if (a > t0) {
      t0 = a;
      axis = k;
    }
    t1 = std::min(t1, c);
    if (t0 > t1) return;
  }
  if (axis < 0 || t0 >= best.t) return;
  // Faces shaded by orientation so edges stay visible.
  const double shade = axis == 2 ? 1.0 : (axis == 0 ? 0.8 : 0.65);
  best.t = t0;
  best.color = b.color * shade;
}

}  // namespace

std::vector<double> home_configuration(const RobotModel& model) {
  std::vector<double> q(model.config_size(), 0.0);
  const std::array<double, 6> reach{0.0, -0.6, 1.8, 0.0, 0.4, 0.0};
  for (Arm arm : kArms) {
    if (!model.has_arm(arm)) continue;
    const ArmChain& chain = model.arm(arm);
    const int off = model.layout().arm_offset[static_cast<int>(arm)];
    for (int i = 0; i < chain.dof(); ++i) {
      double v = chain.dof() == 6 ? reach[i] : 0.0;
      // Swing both arms towards the middle of the view.
      if (chain.dof() == 6 && i == 0) v = arm == Arm::kLeft ? -0.5 : 0.5;
      q[off + i] = std::clamp(v, chain.lower[i], chain.upper[i]);
    }
    q[model.layout().gripper_offset[static_cast<int>(arm)]] = 0.5;
  }
  return q;
}

JointTrajectory synthetic_trajectory(const RobotModel& model, std::size_t frames, std::uint64_t seed,
                                     double amplitude) {
  if (frames == 0) throw InvalidArgument("trajectory needs at least one frame");
  const std::vector<double> home = home_configuration(model);
  const int n = model.config_size();
  Rng rng(seed);
  std::vector<double> freq(n);
  std::vector<double> phase(n);
  for (int c = 0; c < n; ++c) {
    freq[c] = uniform(rng, 0.5, 1.5);
    phase[c] = uniform(rng, 0.0, 2.0 * kPi);
  }
  JointTrajectory traj(n);
  std::vector<double> q(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const double s = frames > 1 ? static_cast<double>(t) / static_cast<double>(frames - 1) : 0.0;
    for (int c = 0; c < n; ++c) q[c] = home[c];
    for (Arm arm : kArms) {
      if (!model.has_arm(arm)) continue;
      const ArmChain& chain = model.arm(arm);
      const int off = model.layout().arm_offset[static_cast<int>(arm)];
      for (int i = 0; i < chain.dof(); ++i) {
        const int c = off + i;
        const double v = home[c] + amplitude * std::sin(2.0 * kPi * freq[c] * s + phase[c]);
        const double margin = 1e-6;
        q[c] = std::clamp(v, chain.lower[i] + margin, chain.upper[i] - margin);
      }
      const int g = model.layout().gripper_offset[static_cast<int>(arm)];
      q[g] = 0.5 + 0.5 * std::sin(2.0 * kPi * freq[g] * s + phase[g]);
    }
    traj.push_back(q, static_cast<double>(t) / 30.0);
  }
  return traj;
}

RgbdFrame tabletop_scene(const CameraModel& camera) {
  camera.validate();
  const RigidTransform base_from_cam = camera.cam_from_base.inverse();
  const Eigen::Vector3d origin = base_from_cam.translation();
  const std::vector<Box> boxes{
      {{0.50, 0.02, kTableZ}, {0.60, 0.12, kTableZ + 0.10}, {200.0, 60.0, 50.0}},
      {{0.68, -0.22, kTableZ}, {0.76, -0.10, kTableZ + 0.14}, {60.0, 90.0, 190.0}},
  };
  RgbdFrame f;
  f.rgb = make_rgb(camera.width, camera.height);
  f.depth = DepthImage(camera.width, camera.height, 1);
  f.validity = make_mask(camera.width, camera.height);
  const double max_units = camera.depth_max / camera.depth_scale();
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      // Ray with unit camera-z component, so the hit parameter is the depth.
      const Eigen::Vector3d dc((u - camera.cx) / camera.fx, (v - camera.cy) / camera.fy, 1.0);
      const Eigen::Vector3d d = base_from_cam.rotate(dc);
      Hit best;
      if (d.z() < 0.0) {
        const double t = (kTableZ - origin.z()) / d.z();
        const Eigen::Vector3d p = origin + t * d;
        if (p.x() > -0.3 && p.x() < 1.3 && std::abs(p.y()) < 0.9) {
          const bool dark = (static_cast<int>(std::floor(p.x() / 0.08)) + static_cast<int>(std::floor(p.y() / 0.08))) % 2 != 0;
          const double grain = 8.0 * std::sin(40.0 * p.x() + 7.0 * std::sin(9.0 * p.y()));
          best.t = t;
          best.color = dark ? Eigen::Vector3d(178.0 + grain, 138.0 + grain, 96.0) : Eigen::Vector3d(212.0 + grain, 178.0 + grain, 130.0);
        }
      }
      if (d.x() > 0.0) {
        const double t = (1.3 - origin.x()) / d.x();
        if (t < best.t) {
          const Eigen::Vector3d p = origin + t * d;
          best.t = t;
          best.color = Eigen::Vector3d(150.0 + 40.0 * std::tanh(p.z()), 165.0 + 20.0 * std::sin(3.0 * p.y()), 175.0);
        }
      }
      for (const Box& b : boxes) hit_box(b, origin, d, best);
      if (!std::isfinite(best.t)) continue;
      const double units = std::round(best.t / camera.depth_scale());
      if (units < 1.0 || units > max_units) continue;
      for (int c = 0; c < 3; ++c) f.rgb(u, v, c) = to_byte(best.color[c]);
      f.depth(u, v) = static_cast<std::uint16_t>(units);
      f.validity(u, v) = 1;
    }
  }
  return f;
}

Episode make_synthetic_episode(const RobotModel& model, const CameraModel& camera, const JointTrajectory& trajectory,
                               const std::string& id, const std::string& robot_config) {
  validate_trajectory(model, trajectory);
  const RgbdFrame scene = tabletop_scene(camera);
  const RobotRenderer renderer(model);
  Episode ep;
  ep.id = id;
  ep.camera = camera;
  ep.trajectory = trajectory;
  ep.robot_config = robot_config;
  ep.frames.resize(trajectory.size());
  ep.robot_masks.resize(trajectory.size());
  const double scale = camera.depth_scale();
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const RenderedRobotFrame robot = renderer.render(trajectory.frame(t), camera);
    RgbdFrame f = scene;
    MaskImage visible = make_mask(camera.width, camera.height);
    for (int y = 0; y < camera.height; ++y) {
      for (int x = 0; x < camera.width; ++x) {
        if (!robot.mask(x, y)) continue;
        const double units = std::round(robot.depth(x, y) / scale);
        if (f.validity(x, y) && units >= f.depth(x, y)) continue;
        if (units < 1.0 || units > 65535.0) continue;
        for (int c = 0; c < 3; ++c) f.rgb(x, y, c) = robot.rgb(x, y, c);
        f.depth(x, y) = static_cast<std::uint16_t>(units);
        f.validity(x, y) = 1;
        visible(x, y) = 1;
      }
    }
    ep.frames[t] = std::move(f);
    ep.robot_masks[t] = std::move(visible);
  }
  ep.validate();
  return ep;
}

RgbdFrame textured_plane_frame(const CameraModel& camera, double distance) {
  if (!(distance > 0.0)) throw InvalidArgument("plane distance must be positive");
  RgbdFrame f;
  f.rgb = make_rgb(camera.width, camera.height);
  f.depth = DepthImage(camera.width, camera.height, 1);
  f.validity = make_mask(camera.width, camera.height, true);
  const auto units = static_cast<std::uint16_t>(std::lround(distance / camera.depth_scale()));
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const double x = (u - camera.cx) * distance / camera.fx;
      const double y = (v - camera.cy) * distance / camera.fy;
      f.rgb(u, v, 0) = to_byte(128.0 + 60.0 * std::sin(2.0 * kPi * x / 0.23) + 30.0 * std::cos(2.0 * kPi * y / 0.31));
      f.rgb(u, v, 1) = to_byte(120.0 + 50.0 * std::sin(2.0 * kPi * (x + y) / 0.19));
      f.rgb(u, v, 2) = to_byte(110.0 + 45.0 * std::cos(2.0 * kPi * x / 0.29) * std::sin(2.0 * kPi * y / 0.21));
      f.depth(u, v) = units;
    }
  }
  return f;
}

}  // namespace egodemo
