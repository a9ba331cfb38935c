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

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "egodemo/geometry.hpp"
#include "egodemo/image.hpp"
#include "egodemo/mesh.hpp"
#include "egodemo/robot_model.hpp"
#include "egodemo/trajectory.hpp"

namespace egodemo {

// Robot-only render. mask is 1 exactly where depth is finite; rgb is black
// outside the mask.
struct RenderedRobotFrame {
  RgbImage rgb;
  MaskImage mask;
  FloatImage depth;  // camera-space z in metres, +inf where empty

  friend bool operator==(const RenderedRobotFrame&, const RenderedRobotFrame&) = default;
};

// A shaded triangle with vertices in the camera frame.
struct CameraTriangle {
  std::array<Eigen::Vector3d, 3> v;
  std::array<std::uint8_t, 3> color{};
};

// Screen coordinates are snapped to 1/256 px. Pixel centres sit at integer
// coordinates (matching u = fx * X / Z + cx).
constexpr int kSubpixelBits = 8;
// Geometry is clipped against this camera-space depth before projection.
constexpr double kRasterNearPlane = 1e-3;

struct ShadingOptions {
  Eigen::Vector3d light_direction{-0.2, 0.5, 1.0};  // camera frame, direction the light travels
  double ambient = 0.35;
  double diffuse = 0.65;
  Eigen::Vector3d default_color{0.6, 0.6, 0.6};
};

// Lambert term with the normal flipped towards the camera, applied to a
// colour in [0, 1] and rounded to 8 bits.
std::array<std::uint8_t, 3> shade_triangle(const std::array<Eigen::Vector3d, 3>& v, const Eigen::Vector3d& color,
                                           const ShadingOptions& shading);

// Z-buffered rasterization. Coverage uses exact integer edge functions at
// pixel centres with a top-left rule for shared edges; depth interpolates
// 1/z perspective-correctly. On equal depth the lower triangle index wins.
// supersample > 1 antialiases rgb only; mask and depth stay binary/exact.
RenderedRobotFrame rasterize_triangles(std::span<const CameraTriangle> triangles, const CameraModel& camera,
                                       int supersample = 1);

struct RenderOptions {
  ShadingOptions shading;
  int supersample = 1;
};

// Caches tessellated link visuals for a model.
class RobotRenderer {
 public:
  explicit RobotRenderer(const RobotModel& model, RenderOptions options = {});

  // Shaded camera-frame triangles for a configuration, links in model order.
  std::vector<CameraTriangle> triangles(std::span<const double> config, const CameraModel& camera) const;
  RenderedRobotFrame render(std::span<const double> config, const CameraModel& camera) const;

  std::size_t dropped_degenerate() const noexcept { return dropped_; }

 private:
  struct Part {
    int link;
    RigidTransform origin;
    TriangleMesh mesh;
    Eigen::Vector3d color;
  };
  const RobotModel& model_;
  RenderOptions options_;
  std::vector<Part> parts_;
  std::size_t dropped_ = 0;
};

RenderedRobotFrame rasterize_robot(const RobotModel& model, std::span<const double> config,
                                   const CameraModel& camera, const RenderOptions& options = {});

std::vector<RenderedRobotFrame> render_robot_video(const RobotModel& model, const JointTrajectory& trajectory,
                                                   const CameraModel& camera, const RenderOptions& options = {},
                                                   int jobs = 1);

}  // namespace egodemo
