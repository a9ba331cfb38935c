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

#include "egodemo/rendering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "egodemo/error.hpp"
#include "egodemo/kinematics.hpp"
#include "egodemo/parallel.hpp"

namespace egodemo {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

struct ScreenVertex {
  i64 x;
  i64 y;
  double z;
};

constexpr double kSubpixel = static_cast<double>(1 << kSubpixelBits);
constexpr double kCoordLimit = 1099511627776.0;  // 2^40 subpixel units

i64 to_fixed(double v) { return static_cast<i64>(std::llround(std::clamp(v * kSubpixel, -kCoordLimit, kCoordLimit))); }

i128 edge(const ScreenVertex& a, const ScreenVertex& b, i64 px, i64 py) {
  return static_cast<i128>(b.x - a.x) * (py - a.y) - static_cast<i128>(b.y - a.y) * (px - a.x);
}

// Exactly one of the two directions of a non-degenerate edge owns it.
bool owns_edge(const ScreenVertex& a, const ScreenVertex& b) {
  const i64 dx = b.x - a.x;
  const i64 dy = b.y - a.y;
  return (dy == 0 && dx > 0) || dy < 0;
}

// Sutherland-Hodgman against z >= near; returns 0, 3 or 4 vertices.
int clip_near(const std::array<Eigen::Vector3d, 3>& in, std::array<Eigen::Vector3d, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& a = in[i];
    const Eigen::Vector3d& b = in[(i + 1) % 3];
    const bool ain = a.z() >= kRasterNearPlane;
    const bool bin = b.z() >= kRasterNearPlane;
    if (ain) out[n++] = a;
    if (ain != bin) {
      const double t = (kRasterNearPlane - a.z()) / (b.z() - a.z());
      Eigen::Vector3d p = a + t * (b - a);
      p.z() = kRasterNearPlane;
      out[n++] = p;
    }
  }
  return n;
}

void raster_one(const ScreenVertex& a, const ScreenVertex& b0, const ScreenVertex& c0,
                const std::array<std::uint8_t, 3>& color, RenderedRobotFrame& f) {
  ScreenVertex p0 = a;
  ScreenVertex p1 = b0;
  ScreenVertex p2 = c0;
  i128 area = edge(p0, p1, p2.x, p2.y);
  if (area == 0) return;
  if (area < 0) {
    std::swap(p1, p2);
    area = -area;
  }
  const int w = f.depth.width();
  const int h = f.depth.height();
  const i64 one = i64{1} << kSubpixelBits;
  auto ceil_px = [&](i64 v) { return v >= 0 ? (v + one - 1) / one : -((-v) / one); };
  auto floor_px = [&](i64 v) { return v >= 0 ? v / one : -((-v + one - 1) / one); };
  const i64 xmin = std::max<i64>(0, ceil_px(std::min({p0.x, p1.x, p2.x})));
  const i64 xmax = std::min<i64>(w - 1, floor_px(std::max({p0.x, p1.x, p2.x})));
  const i64 ymin = std::max<i64>(0, ceil_px(std::min({p0.y, p1.y, p2.y})));
  const i64 ymax = std::min<i64>(h - 1, floor_px(std::max({p0.y, p1.y, p2.y})));
  if (xmin > xmax || ymin > ymax) return;

  const bool own0 = owns_edge(p1, p2);
  const bool own1 = owns_edge(p2, p0);
  const bool own2 = owns_edge(p0, p1);
  const double inv_area = 1.0 / static_cast<double>(area);
  const double iz0 = 1.0 / p0.z;
  const double iz1 = 1.0 / p1.z;
  const double iz2 = 1.0 / p2.z;
  for (i64 y = ymin; y <= ymax; ++y) {
    const i64 py = y * one;
    for (i64 x = xmin; x <= xmax; ++x) {
      const i64 px = x * one;
      const i128 e0 = edge(p1, p2, px, py);
      const i128 e1 = edge(p2, p0, px, py);
      const i128 e2 = edge(p0, p1, px, py);
      if (e0 < 0 || e1 < 0 || e2 < 0) continue;
      if ((e0 == 0 && !own0) || (e1 == 0 && !own1) || (e2 == 0 && !own2)) continue;
      const double l0 = static_cast<double>(e0) * inv_area;
      const double l1 = static_cast<double>(e1) * inv_area;
      const double l2 = static_cast<double>(e2) * inv_area;
      const double z = 1.0 / (l0 * iz0 + l1 * iz1 + l2 * iz2);
      const int xi = static_cast<int>(x);
      const int yi = static_cast<int>(y);
      if (z < f.depth(xi, yi)) {
        f.depth(xi, yi) = z;
        f.mask(xi, yi) = 1;
        for (int c = 0; c < 3; ++c) f.rgb(xi, yi, c) = color[c];
      }
    }
  }
}

RenderedRobotFrame raster_plain(std::span<const CameraTriangle> triangles, const CameraModel& camera) {
  RenderedRobotFrame f;
  f.rgb = make_rgb(camera.width, camera.height);
  f.mask = make_mask(camera.width, camera.height);
  f.depth = FloatImage(camera.width, camera.height, 1, std::numeric_limits<double>::infinity());
  auto project = [&](const Eigen::Vector3d& p) {
    return ScreenVertex{to_fixed(camera.fx * p.x() / p.z() + camera.cx),
                        to_fixed(camera.fy * p.y() / p.z() + camera.cy), p.z()};
  };
  std::array<Eigen::Vector3d, 4> poly;
  for (const CameraTriangle& t : triangles) {
    const int n = clip_near(t.v, poly);
    if (n < 3) continue;
    const ScreenVertex s0 = project(poly[0]);
    for (int k = 1; k + 1 < n; ++k) raster_one(s0, project(poly[k]), project(poly[k + 1]), t.color, f);
  }
  return f;
}

}  // namespace

std::array<std::uint8_t, 3> shade_triangle(const std::array<Eigen::Vector3d, 3>& v, const Eigen::Vector3d& color,
                                           const ShadingOptions& shading) {
  Eigen::Vector3d n = (v[1] - v[0]).cross(v[2] - v[0]);
  double lambert = 0.0;
  const double len = n.norm();
  if (len > 0.0) {
    n /= len;
    // Face the camera (which sits at the origin looking down +z).
    if (n.dot(v[0]) > 0.0) n = -n;
    const Eigen::Vector3d l = -shading.light_direction.normalized();
    lambert = std::max(0.0, n.dot(l));
  }
  const double k = shading.ambient + shading.diffuse * lambert;
  std::array<std::uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(std::lround(std::clamp(color[c] * k, 0.0, 1.0) * 255.0));
  }
  return out;
}

RenderedRobotFrame rasterize_triangles(std::span<const CameraTriangle> triangles, const CameraModel& camera,
                                       int supersample) {
  if (supersample < 1) throw InvalidArgument("supersample factor must be >= 1");
  if (camera.width <= 0 || camera.height <= 0) throw InvalidArgument("camera has empty image size");
  RenderedRobotFrame f = raster_plain(triangles, camera);
  if (supersample == 1) return f;

  CameraModel hi = camera;
  const int s = supersample;
  hi.width = camera.width * s;
  hi.height = camera.height * s;
  hi.fx = camera.fx * s;
  hi.fy = camera.fy * s;
  hi.cx = s * (camera.cx + 0.5) - 0.5;
  hi.cy = s * (camera.cy + 0.5) - 0.5;
  const RenderedRobotFrame big = raster_plain(triangles, hi);
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      if (!f.mask(x, y)) continue;
      int count = 0;
      int sum[3] = {0, 0, 0};
      for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) {
          if (!big.mask(x * s + i, y * s + j)) continue;
          ++count;
          for (int c = 0; c < 3; ++c) sum[c] += big.rgb(x * s + i, y * s + j, c);
        }
      }
      if (count == 0) continue;
      for (int c = 0; c < 3; ++c) f.rgb(x, y, c) = static_cast<std::uint8_t>((2 * sum[c] + count) / (2 * count));
    }
  }
  return f;
}

RobotRenderer::RobotRenderer(const RobotModel& model, RenderOptions options)
    : model_(model), options_(std::move(options)) {
  for (std::size_t li = 0; li < model.links().size(); ++li) {
    for (const LinkVisual& vis : model.links()[li].visuals) {
      Part part{static_cast<int>(li), vis.origin, {}, vis.color.value_or(options_.shading.default_color)};
      if (const auto* m = std::get_if<MeshFile>(&vis.geometry)) {
        MeshLoadResult r = load_mesh(m->path);
        dropped_ += r.dropped_degenerate;
        for (auto& v : r.mesh.vertices) v = v.cwiseProduct(m->scale);
        part.mesh = std::move(r.mesh);
      } else if (const auto* b = std::get_if<BoxShape>(&vis.geometry)) {
        part.mesh = make_box(b->size);
      } else if (const auto* c = std::get_if<CylinderShape>(&vis.geometry)) {
        part.mesh = make_cylinder(c->radius, c->length);
      } else if (const auto* s = std::get_if<SphereShape>(&vis.geometry)) {
        part.mesh = make_sphere(s->radius);
      }
      parts_.push_back(std::move(part));
    }
  }
}

std::vector<CameraTriangle> RobotRenderer::triangles(std::span<const double> config,
                                                     const CameraModel& camera) const {
  const std::vector<RigidTransform> poses = link_poses(model_, config);
  std::vector<CameraTriangle> out;
  std::vector<Eigen::Vector3d> verts;
  for (const Part& part : parts_) {
    const RigidTransform to_cam = camera.cam_from_base * poses[part.link] * part.origin;
    verts.resize(part.mesh.vertices.size());
    for (std::size_t i = 0; i < verts.size(); ++i) verts[i] = to_cam * part.mesh.vertices[i];
    for (const auto& t : part.mesh.triangles) {
      CameraTriangle ct;
      ct.v = {verts[t[0]], verts[t[1]], verts[t[2]]};
      ct.color = shade_triangle(ct.v, part.color, options_.shading);
      out.push_back(ct);
    }
  }
  return out;
}

RenderedRobotFrame RobotRenderer::render(std::span<const double> config, const CameraModel& camera) const {
  const auto tris = triangles(config, camera);
  return rasterize_triangles(tris, camera, options_.supersample);
}

RenderedRobotFrame rasterize_robot(const RobotModel& model, std::span<const double> config,
                                   const CameraModel& camera, const RenderOptions& options) {
  return RobotRenderer(model, options).render(config, camera);
}

std::vector<RenderedRobotFrame> render_robot_video(const RobotModel& model, const JointTrajectory& trajectory,
                                                   const CameraModel& camera, const RenderOptions& options,
                                                   int jobs) {
  validate_trajectory(model, trajectory);
  const RobotRenderer renderer(model, options);
  std::vector<RenderedRobotFrame> frames(trajectory.size());
  parallel_for(frames.size(), jobs, [&](std::size_t t) { frames[t] = renderer.render(trajectory.frame(t), camera); });
  return frames;
}

}  // namespace egodemo
