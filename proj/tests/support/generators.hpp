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

// Random inputs shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "egodemo/random.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/reprojection.hpp"
#include "test_support.hpp"

namespace egodemo::testing {

// Camera-frame point that projects to pixel (u, v) at depth z.
inline Eigen::Vector3d at_pixel(const CameraModel& cam, double u, double v, double z) {
  return {(u - cam.cx) * z / cam.fx, (v - cam.cy) * z / cam.fy, z};
}

inline PointCloud random_cloud(Rng& rng, std::size_t n, const CameraModel& cam) {
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    // Quantised depths make exact ties and within-epsilon neighbours common.
    const double z = 0.5 + 0.001 * static_cast<double>(uniform_index(rng, 400));
    const double u = uniform(rng, -2, cam.width + 1);
    const double v = uniform(rng, -2, cam.height + 1);
    const Eigen::Vector3d c(uniform01(rng), uniform01(rng), uniform01(rng));
    cloud.push_back(at_pixel(cam, u, v, z), c, static_cast<std::uint32_t>(i));
  }
  return cloud;
}

inline std::vector<CameraTriangle> random_scene(Rng& rng, const CameraModel& cam, int count) {
  std::vector<CameraTriangle> tris;
  for (int i = 0; i < count; ++i) {
    const double cu = uniform(rng, -10, cam.width + 10);
    const double cv = uniform(rng, -10, cam.height + 10);
    // Quantised depths so that equal-depth ties actually happen.
    const double z = 0.5 + 0.25 * static_cast<double>(uniform_index(rng, 8));
    CameraTriangle t;
    for (int k = 0; k < 3; ++k) {
      const double zk = rng() % 3 == 0 ? z : z + uniform(rng, 0, 1);
      t.v[k] = at_pixel(cam, cu + uniform(rng, -30, 30), cv + uniform(rng, -30, 30), zk);
    }
    t.color = {std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
    tris.push_back(t);
  }
  return tris;
}

// Each pixel is invalidated (and blacked out) with the given probability.
inline RgbdFrame with_holes(RgbImage rgb, Rng& rng, int hole_percent) {
  RgbdFrame f;
  const int w = rgb.width(), h = rgb.height();
  f.rgb = std::move(rgb);
  f.depth = DepthImage(w, h, 1, 700);
  f.validity = make_mask(w, h, true);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (static_cast<int>(uniform_index(rng, 100)) < hole_percent) {
        f.validity(x, y) = 0;
        for (int c = 0; c < 3; ++c) f.rgb(x, y, c) = 0;
      }
  return f;
}

inline RgbImage with_noise(const RgbImage& img, int amplitude, Rng& rng) {
  RgbImage out = img;
  for (auto& v : out.data()) {
    const int n = static_cast<int>(uniform_index(rng, 2 * amplitude + 1)) - amplitude;
    v = static_cast<std::uint8_t>(std::clamp(int(v) + n, 0, 255));
  }
  return out;
}

}  // namespace egodemo::testing
