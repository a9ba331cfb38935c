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

#include "egodemo/reprojection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "egodemo/error.hpp"

namespace egodemo {

std::size_t RgbdFrame::valid_count() const {
  return static_cast<std::size_t>(std::count_if(validity.data().begin(), validity.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

namespace {

RgbdFrame align_impl(const RgbdFrame& frame, double max_units) {
  const int w = frame.rgb.width();
  const int h = frame.rgb.height();
  const int wd = frame.depth.width();
  const int hd = frame.depth.height();
  if (wd == 0 || hd == 0) throw DataError("frame has no depth");
  const bool has_validity = frame.validity.width() == w && frame.validity.height() == h;
  if (!frame.validity.empty() && !has_validity) throw InvalidArgument("validity size does not match rgb");

  RgbdFrame out;
  out.rgb = frame.rgb;
  if (wd == w && hd == h) {
    out.depth = frame.depth;
  } else {
    out.depth = DepthImage(w, h, 1);
    std::vector<int> sx(w);
    for (int x = 0; x < w; ++x) sx[x] = static_cast<int>((2LL * x + 1) * wd / (2LL * w));
    for (int y = 0; y < h; ++y) {
      const int syy = static_cast<int>((2LL * y + 1) * hd / (2LL * h));
      for (int x = 0; x < w; ++x) out.depth(x, y) = frame.depth(sx[x], syy);
    }
  }
  out.validity = make_mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint16_t d = out.depth(x, y);
      const bool ok = (!has_validity || frame.validity(x, y)) && d != 0 && d <= max_units;
      out.validity(x, y) = ok ? 1 : 0;
    }
  }
  return out;
}

void check_frame(const RgbdFrame& frame, const CameraModel& camera) {
  if (frame.rgb.channels() != 3) throw InvalidArgument("rgb image must have 3 channels");
  if (frame.rgb.width() != camera.width || frame.rgb.height() != camera.height) {
    throw InvalidArgument("frame size " + std::to_string(frame.rgb.width()) + "x" +
                          std::to_string(frame.rgb.height()) + " does not match camera " +
                          std::to_string(camera.width) + "x" + std::to_string(camera.height));
  }
  if (!frame.depth.same_size(frame.rgb) || !frame.validity.same_size(frame.rgb)) {
    throw InvalidArgument("depth and validity must be aligned to rgb");
  }
}

// Projected coordinates this close to an integer are treated as exact, so
// that backprojection followed by projection lands back on pixel centres.
constexpr double kSnap = 1e-6;
constexpr double kNearPlane = 1e-6;

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= kSnap ? r : v;
}

struct Splat {
  double depth;
  double weight;
  std::uint32_t index;
};

}  // namespace

RgbdFrame align_depth_to_rgb(const RgbdFrame& frame) {
  return align_impl(frame, std::numeric_limits<double>::infinity());
}

RgbdFrame align_depth_to_rgb(const RgbdFrame& frame, const CameraModel& camera) {
  return align_impl(frame, camera.depth_max / camera.depth_scale());
}

MaskImage dilate_disc(const MaskImage& mask, int radius) {
  if (radius < 0) throw InvalidArgument("dilation radius must be >= 0");
  if (radius == 0) return mask;
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
  MaskImage out = make_mask(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      for (auto [dx, dy] : offsets) {
        if (out.contains(x + dx, y + dy)) out(x + dx, y + dy) = 1;
      }
    }
  }
  return out;
}

RgbdFrame apply_mask_with_dilation(const RgbdFrame& frame, const MaskImage& mask, int dilation_radius) {
  if (!mask.same_size(frame.rgb) || !frame.validity.same_size(frame.rgb)) {
    throw InvalidArgument("mask size " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                          " does not match frame " + std::to_string(frame.rgb.width()) + "x" +
                          std::to_string(frame.rgb.height()));
  }
  const MaskImage dilated = dilate_disc(mask, dilation_radius);
  RgbdFrame out = frame;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (!dilated(x, y)) continue;
      for (int c = 0; c < 3; ++c) out.rgb(x, y, c) = 0;
      out.validity(x, y) = 0;
    }
  }
  return out;
}

PointCloud backproject(const RgbdFrame& frame, const CameraModel& camera) {
  check_frame(frame, camera);
  const double s = camera.depth_scale();
  PointCloud cloud;
  for (int v = 0; v < frame.height(); ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      if (!frame.validity(u, v)) continue;
      const double z = frame.depth(u, v) * s;
      if (!(z > 0.0) || z > camera.depth_max) continue;
      const Eigen::Vector3d p((u - camera.cx) * z / camera.fx, (v - camera.cy) * z / camera.fy, z);
      const Eigen::Vector3d c(frame.rgb(u, v, 0) / 255.0, frame.rgb(u, v, 1) / 255.0, frame.rgb(u, v, 2) / 255.0);
      cloud.push_back(p, c, static_cast<std::uint32_t>(v * frame.width() + u));
    }
  }
  return cloud;
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& transform) {
  PointCloud out = cloud;
  for (auto& p : out.points) p = transform * p;
  return out;
}

RgbdFrame project_zbuffer(const PointCloud& cloud, const CameraModel& camera, SplatTrace* trace) {
  const int w = camera.width;
  const int h = camera.height;
  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  const double eps = camera.depth_scale();

  // Bin splats per pixel (counting pass, then fill) in cloud order.
  struct Pending {
    std::uint32_t pixel;
    Splat splat;
  };
  std::vector<Pending> pending;
  pending.reserve(cloud.size() * 4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d& p = cloud.points[i];
    const double z = p.z();
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()) || !(z > kNearPlane) || z > camera.depth_max) continue;
    const double u = snap(camera.fx * p.x() / z + camera.cx);
    const double v = snap(camera.fy * p.y() / z + camera.cy);
    if (!(u > -1.0 && v > -1.0 && u < w && v < h)) continue;
    const double x0 = std::floor(u);
    const double y0 = std::floor(v);
    const double a = u - x0;
    const double b = v - y0;
    const double weights[4] = {(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b};
    for (int k = 0; k < 4; ++k) {
      if (weights[k] <= 0.0) continue;
      const int x = static_cast<int>(x0) + (k & 1);
      const int y = static_cast<int>(y0) + (k >> 1);
      if (x < 0 || y < 0 || x >= w || y >= h) continue;
      pending.push_back({static_cast<std::uint32_t>(y * w + x), {z, weights[k], static_cast<std::uint32_t>(i)}});
    }
  }
  std::vector<std::uint32_t> offsets(pixels + 1, 0);
  for (const auto& p : pending) ++offsets[p.pixel + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Splat> bins(pending.size());
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& p : pending) bins[cursor[p.pixel]++] = p.splat;
  }
  pending.clear();
  pending.shrink_to_fit();

  RgbdFrame out;
  out.rgb = make_rgb(w, h);
  out.depth = DepthImage(w, h, 1);
  out.validity = make_mask(w, h);
  if (trace) {
    trace->offsets.assign(1, 0);
    trace->offsets.reserve(pixels + 1);
    trace->sources.clear();
  }
  const double max_units = 65535.0;
  for (std::size_t px = 0; px < pixels; ++px) {
    const auto first = bins.begin() + offsets[px];
    const auto last = bins.begin() + offsets[px + 1];
    if (first != last) {
      double zmin = first->depth;
      for (auto it = first; it != last; ++it) zmin = std::min(zmin, it->depth);
      auto keep_end = std::partition(first, last, [&](const Splat& s) { return s.depth - zmin <= eps; });
      std::sort(first, keep_end, [](const Splat& l, const Splat& r) {
        return l.depth < r.depth || (l.depth == r.depth && l.index < r.index);
      });
      double wsum = 0.0;
      Eigen::Vector3d csum = Eigen::Vector3d::Zero();
      for (auto it = first; it != keep_end; ++it) {
        wsum += it->weight;
        csum += it->weight * cloud.colors[it->index];
        if (trace) trace->sources.push_back(it->index);
      }
      const int x = static_cast<int>(px % w);
      const int y = static_cast<int>(px / w);
      for (int c = 0; c < 3; ++c) {
        const double value = std::clamp(csum[c] / wsum * 255.0, 0.0, 255.0);
        out.rgb(x, y, c) = static_cast<std::uint8_t>(std::lround(value));
      }
      const double units = std::clamp(std::round(zmin / camera.depth_scale()), 1.0, max_units);
      out.depth(x, y) = static_cast<std::uint16_t>(units);
      out.validity(x, y) = 1;
    }
    if (trace) trace->offsets.push_back(static_cast<std::uint32_t>(trace->sources.size()));
  }
  return out;
}

RgbdFrame reproject_frame(const RgbdFrame& frame, const CameraModel& camera, const RigidTransform& relative) {
  return project_zbuffer(transform_cloud(backproject(frame, camera), relative), camera);
}

RgbdFrame double_reproject(const RgbdFrame& frame, const CameraModel& camera, const EgoMotion& motion) {
  const RigidTransform forward = camera_relative_transform(camera, motion);
  const RgbdFrame novel = reproject_frame(frame, camera, forward);
  return reproject_frame(novel, camera, forward.inverse());
}

}  // namespace egodemo
