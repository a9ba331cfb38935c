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
#include <vector>

#include <Eigen/Core>

#include "egodemo/geometry.hpp"
#include "egodemo/image.hpp"

namespace egodemo {

// One RGB-D observation. Depth is in stored units (0 = missing) and may have
// a different size than rgb until align_depth_to_rgb runs. validity has the
// rgb size; 1 marks pixels that carry real content.
struct RgbdFrame {
  RgbImage rgb;
  DepthImage depth;
  MaskImage validity;

  int width() const noexcept { return rgb.width(); }
  int height() const noexcept { return rgb.height(); }
  std::size_t valid_count() const;

  friend bool operator==(const RgbdFrame&, const RgbdFrame&) = default;
};

// Points in a camera frame with colours in [0, 1]. source[i] is the
// y * width + x index of the pixel the point came from.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> colors;
  std::vector<std::uint32_t> source;

  std::size_t size() const noexcept { return points.size(); }
  void push_back(const Eigen::Vector3d& p, const Eigen::Vector3d& c, std::uint32_t src) {
    points.push_back(p);
    colors.push_back(c);
    source.push_back(src);
  }
};

// Nearest-neighbour resample of depth onto the rgb grid. Validity becomes
// (incoming validity, or all-true if absent) && depth != 0, and with a camera
// also depth * scale <= depth_max.
RgbdFrame align_depth_to_rgb(const RgbdFrame& frame);
RgbdFrame align_depth_to_rgb(const RgbdFrame& frame, const CameraModel& camera);

// Binary dilation with a disc of the given radius (offsets with
// dx^2 + dy^2 <= r^2). Radius 0 returns the input.
MaskImage dilate_disc(const MaskImage& mask, int radius);

// Zeroes rgb and clears validity under the dilated mask. Depth is kept.
RgbdFrame apply_mask_with_dilation(const RgbdFrame& frame, const MaskImage& mask, int dilation_radius);

// Valid pixels with 0 < z <= depth_max become points, in row-major order.
PointCloud backproject(const RgbdFrame& frame, const CameraModel& camera);

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& transform);

// Per output pixel, the source indices (cloud order) of the splats that
// survived the depth test, in accumulation order. CSR layout: pixel p owns
// sources[offsets[p] .. offsets[p + 1]).
struct SplatTrace {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> sources;
};

// Bilinear splatting with a per-pixel depth test. Each point spreads over
// its four neighbouring pixel centres; at every pixel only splats within one
// stored depth unit of the nearest splat survive, and they are blended in
// (depth, cloud index) order so the result does not depend on traversal
// order. Output depth is the nearest splat depth rounded to stored units.
// Pixels without surviving weight are holes: rgb 0, depth 0, invalid.
RgbdFrame project_zbuffer(const PointCloud& cloud, const CameraModel& camera, SplatTrace* trace = nullptr);

RgbdFrame reproject_frame(const RgbdFrame& frame, const CameraModel& camera, const RigidTransform& relative);

// Warp to the view reached by `motion`, then back with the inverse transform
// using the splatted depth of the intermediate view.
RgbdFrame double_reproject(const RgbdFrame& frame, const CameraModel& camera, const EgoMotion& motion);

}  // namespace egodemo
