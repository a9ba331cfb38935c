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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "egodemo/mesh.hpp"
#include "egodemo/random.hpp"
#include "egodemo/rendering.hpp"
#include "egodemo/synthetic.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace egodemo {
namespace {

using testing::at_pixel;
using testing::random_scene;
using testing::toy_camera;

using CanonicalTri = std::array<std::array<double, 3>, 3>;

// Triangle set with each triangle's vertices sorted, then the triangles sorted.
std::vector<CanonicalTri> canonical(const TriangleMesh& m) {
  std::vector<CanonicalTri> out;
  for (const auto& t : m.triangles) {
    CanonicalTri c;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d& v = m.vertices[t[k]];
      c[k] = {v.x(), v.y(), v.z()};
    }
    std::sort(c.begin(), c.end());
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Mesh, CubeObj) {
  const MeshLoadResult r = load_mesh(testing::fixture_dir() / "cube.obj");
  EXPECT_EQ(r.mesh.vertices.size(), 8u);
  EXPECT_EQ(r.mesh.triangles.size(), 12u);
  EXPECT_EQ(r.dropped_degenerate, 0u);
}

TEST(Mesh, StlMatchesObj) {
  const MeshLoadResult obj = load_mesh(testing::fixture_dir() / "cube.obj");
  const MeshLoadResult stl = load_mesh(testing::fixture_dir() / "cube_ascii.stl");
  EXPECT_EQ(stl.mesh.vertices.size(), 8u);
  EXPECT_EQ(canonical(obj.mesh), canonical(stl.mesh));
}

TEST(Mesh, BinaryStlMatchesAscii) {
  const TriangleMesh cube = load_mesh(testing::fixture_dir() / "cube.obj").mesh;
  std::string bytes(80, '\0');
  auto put = [&bytes](const void* p, std::size_t n) { bytes.append(static_cast<const char*>(p), n); };
  const std::uint32_t count = static_cast<std::uint32_t>(cube.triangles.size());
  put(&count, 4);
  for (const auto& t : cube.triangles) {
    const float normal[3] = {0, 0, 0};
    put(normal, sizeof normal);
    for (int k = 0; k < 3; ++k) {
      const float v[3] = {float(cube.vertices[t[k]].x()), float(cube.vertices[t[k]].y()),
                          float(cube.vertices[t[k]].z())};
      put(v, sizeof v);
    }
    const std::uint16_t attr = 0;
    put(&attr, 2);
  }
  const MeshLoadResult r = parse_stl(bytes, "cube.stl");
  EXPECT_EQ(canonical(r.mesh), canonical(cube));
}

TEST(Mesh, DegenerateTriangleIsDropped) {
  const MeshLoadResult r = load_mesh(testing::fixture_dir() / "degenerate.obj");
  EXPECT_EQ(r.mesh.triangles.size(), 2u);
  EXPECT_EQ(r.dropped_degenerate, 1u);
}

TEST(Mesh, QuadsAreSplitAndBadInputRejected) {
  const MeshLoadResult r = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  EXPECT_EQ(r.mesh.triangles.size(), 2u);
  const MeshLoadResult neg = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nf -3/1 -2/2/2 -1//3\n");
  EXPECT_EQ(neg.mesh.triangles.size(), 1u);
  EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n"), DataError);
  EXPECT_THROW(parse_obj("v 0 zero 0\n"), DataError);
  EXPECT_THROW(load_mesh(testing::fixture_dir() / "cycle.urdf"), DataError);
  EXPECT_THROW(parse_stl("solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\n"), DataError);
}

TEST(Mesh, PrimitivesAreClosedAndSized) {
  const TriangleMesh box = make_box({0.2, 0.4, 0.6});
  EXPECT_EQ(box.vertices.size(), 8u);
  EXPECT_EQ(box.triangles.size(), 12u);
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-1e9);
  for (const auto& v : box.vertices) hi = hi.cwiseMax(v);
  EXPECT_TRUE(hi.isApprox(Eigen::Vector3d(0.1, 0.2, 0.3)));
  for (const auto& v : make_sphere(0.3).vertices) EXPECT_NEAR(v.norm(), 0.3, 1e-12);
  for (const auto& v : make_cylinder(0.1, 0.5).vertices) EXPECT_LE(std::abs(v.z()), 0.25 + 1e-12);
}

CameraTriangle tri(Eigen::Vector3d a, Eigen::Vector3d b, Eigen::Vector3d c, std::array<std::uint8_t, 3> color) {
  return {{a, b, c}, color};
}

void expect_coherent(const RenderedRobotFrame& f) {
  for (int y = 0; y < f.mask.height(); ++y)
    for (int x = 0; x < f.mask.width(); ++x) {
      ASSERT_EQ(f.mask(x, y) != 0, std::isfinite(f.depth(x, y))) << x << "," << y;
      if (!f.mask(x, y)) {
        for (int c = 0; c < 3; ++c) ASSERT_EQ(f.rgb(x, y, c), 0);
      }
    }
}

TEST(Rasterize, BehindCameraIsEmpty) {
  const CameraModel cam = toy_camera(32, 32);
  const std::vector<CameraTriangle> tris{tri({-1, -1, -1}, {1, -1, -1}, {0, 1, -1}, {255, 0, 0})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  EXPECT_TRUE(std::none_of(f.mask.data().begin(), f.mask.data().end(), [](auto v) { return v != 0; }));
}

TEST(Rasterize, SingleTriangleMatchesHalfSpaceOracle) {
  const CameraModel cam = toy_camera(40, 40);
  const std::vector<CameraTriangle> tris{
      tri(at_pixel(cam, 3.2, 4.7, 1), at_pixel(cam, 33.9, 10.1, 1), at_pixel(cam, 12.5, 36.0, 1), {10, 20, 30})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  EXPECT_EQ(f, oracle::raster(tris, cam));
  expect_coherent(f);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      if (f.mask(x, y)) {
        EXPECT_NEAR(f.depth(x, y), 1.0, 1e-12);
      }
}

TEST(Rasterize, NearerTriangleWinsOverlap) {
  const CameraModel cam = toy_camera(40, 40);
  const std::vector<CameraTriangle> tris{
      tri(at_pixel(cam, 0, 0, 2), at_pixel(cam, 39, 0, 2), at_pixel(cam, 0, 39, 2), {0, 0, 255}),
      tri(at_pixel(cam, 5, 5, 1), at_pixel(cam, 30, 5, 1), at_pixel(cam, 5, 30, 1), {255, 0, 0})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  EXPECT_EQ(f.rgb(10, 10, 0), 255);
  EXPECT_NEAR(f.depth(10, 10), 1.0, 1e-12);
  EXPECT_EQ(f.rgb(2, 2, 2), 255);
  EXPECT_NEAR(f.depth(2, 2), 2.0, 1e-12);
}

TEST(Rasterize, EqualDepthTieGoesToLowerIndex) {
  const CameraModel cam = toy_camera(20, 20);
  const auto a = at_pixel(cam, 0, 0, 1), b = at_pixel(cam, 19, 0, 1), c = at_pixel(cam, 0, 19, 1);
  const std::vector<CameraTriangle> tris{tri(a, b, c, {1, 1, 1}), tri(a, b, c, {2, 2, 2})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  EXPECT_EQ(f.rgb(3, 3, 0), 1);
}

TEST(Rasterize, SplitQuadIsWatertight) {
  const CameraModel cam = toy_camera(48, 48);
  // The shared diagonal passes exactly through pixel centres.
  const auto p00 = at_pixel(cam, 4, 4, 1.5), p10 = at_pixel(cam, 40, 4, 1.5);
  const auto p11 = at_pixel(cam, 40, 40, 1.5), p01 = at_pixel(cam, 4, 40, 1.5);
  for (bool flip : {false, true}) {
    const CameraTriangle t0 = flip ? tri(p00, p11, p10, {255, 0, 0}) : tri(p00, p10, p11, {255, 0, 0});
    const CameraTriangle t1 = flip ? tri(p00, p01, p11, {0, 255, 0}) : tri(p00, p11, p01, {0, 255, 0});
    const RenderedRobotFrame a = rasterize_triangles(std::vector<CameraTriangle>{t0}, cam);
    const RenderedRobotFrame b = rasterize_triangles(std::vector<CameraTriangle>{t1}, cam);
    int covered = 0;
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 48; ++x) {
        EXPECT_FALSE(a.mask(x, y) && b.mask(x, y)) << "double cover at " << x << "," << y;
        covered += a.mask(x, y) || b.mask(x, y);
      }
    // Top and left quad edges are owned, bottom and right are not: 36 x 36 centres.
    EXPECT_EQ(covered, 36 * 36);
  }
}

TEST(Rasterize, TiltedPlaneDepthIsPerspectiveCorrect) {
  const CameraModel cam = toy_camera(64, 64);
  // Plane z = 1.5 + 0.5 x (camera frame).
  auto on_plane = [&](double u, double v) {
    const double rx = (u - cam.cx) / cam.fx;
    const double ry = (v - cam.cy) / cam.fy;
    const double z = 1.5 / (1.0 - 0.5 * rx);
    return Eigen::Vector3d(rx * z, ry * z, z);
  };
  const std::vector<CameraTriangle> tris{tri(on_plane(2, 2), on_plane(60, 5), on_plane(10, 61), {9, 9, 9})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  int n = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (!f.mask(x, y)) continue;
      EXPECT_NEAR(f.depth(x, y), on_plane(x, y).z(), 1e-6);
      ++n;
    }
  EXPECT_GT(n, 500);
}

TEST(Rasterize, MatchesEdgeFunctionOracle) {
  const CameraModel cam = toy_camera(128, 128, 90.0);
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const auto tris = random_scene(rng, cam, 20 * (trial + 1));
    const RenderedRobotFrame f = rasterize_triangles(tris, cam);
    ASSERT_EQ(f, oracle::raster(tris, cam)) << "trial " << trial;
    expect_coherent(f);
  }
}

TEST(Rasterize, SupersamplingKeepsMaskAndDepth) {
  const CameraModel cam = toy_camera(64, 64);
  Rng rng(52);
  const auto tris = random_scene(rng, cam, 30);
  const RenderedRobotFrame a = rasterize_triangles(tris, cam, 1);
  const RenderedRobotFrame b = rasterize_triangles(tris, cam, 3);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_NE(a.rgb, b.rgb);
  expect_coherent(b);
}

TEST(Rasterize, NearPlaneClipsCrossingTriangles) {
  const CameraModel cam = toy_camera(64, 64);
  const std::vector<CameraTriangle> tris{tri({-0.5, -0.5, -1.0}, {0.5, -0.5, 2.0}, {0.0, 0.5, 2.0}, {50, 60, 70})};
  const RenderedRobotFrame f = rasterize_triangles(tris, cam);
  expect_coherent(f);
  for (double d : f.depth.data())
    if (std::isfinite(d)) {
      EXPECT_GE(d, kRasterNearPlane);
    }
}

TEST(Shading, FacingLightIsBrighterThanGrazing) {
  const ShadingOptions s;
  const Eigen::Vector3d white(1, 1, 1);
  const Eigen::Vector3d n = -s.light_direction.normalized();
  const Eigen::Vector3d u = n.unitOrthogonal();
  const Eigen::Vector3d w = n.cross(u);
  const auto facing = shade_triangle({Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0, 0, 2) + u,
                                      Eigen::Vector3d(0, 0, 2) + w}, white, s);
  const auto grazing = shade_triangle({Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0, 0, 2) + n,
                                       Eigen::Vector3d(0, 0, 2) + u}, white, s);
  EXPECT_EQ(facing[0], 255);
  EXPECT_EQ(grazing[0], static_cast<std::uint8_t>(std::lround(255 * s.ambient)));
}

// Planar fixture seen from 0.5 m above, looking straight down. Links come
// out about 3.6 px wide.
CameraModel overhead_camera() {
  CameraModel c = toy_camera(128, 128, 60.0);
  Eigen::Matrix3d r = Eigen::Vector3d(1, -1, -1).asDiagonal();
  c.cam_from_base = RigidTransform(r, Eigen::Vector3d(0, 0, 0.5));
  return c;
}

TEST(RobotRender, MaskCentroidFollowsJointSweep) {
  const RobotModel& m = testing::planar();
  const CameraModel cam = overhead_camera();
  double last = -10;
  for (int i = 0; i <= 8; ++i) {
    std::vector<double> config(m.config_size(), 0.0);
    config[0] = -1.2 + 0.3 * i;
    const RenderedRobotFrame f = rasterize_robot(m, config, cam);
    expect_coherent(f);
    double su = 0, sv = 0;
    int n = 0;
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x)
        if (f.mask(x, y)) su += x, sv += y, ++n;
    ASSERT_GT(n, 0);
    // Image v grows towards base -y, so the base-frame angle is atan2(-dv, du).
    const double angle = std::atan2(-(sv / n - cam.cy), su / n - cam.cx);
    EXPECT_GT(angle, last) << "step " << i;
    EXPECT_NEAR(angle, config[0], 0.15);
    last = angle;
  }
}

TEST(RobotRender, VideoFramesMatchSingleRenders) {
  const RobotModel& m = testing::dual_arm();
  const CameraModel cam = testing::sim_camera().resized(80, 60);
  JointTrajectory constant;
  const auto home = home_configuration(m);
  for (int t = 0; t < 3; ++t) constant.push_back(home);
  const auto video = render_robot_video(m, constant, cam, {}, 2);
  ASSERT_EQ(video.size(), 3u);
  EXPECT_EQ(video[0], video[1]);
  EXPECT_EQ(video[1], video[2]);
  EXPECT_EQ(video[0], rasterize_robot(m, home, cam));
  expect_coherent(video[0]);
  EXPECT_GT(std::count(video[0].mask.data().begin(), video[0].mask.data().end(), 1), 50);
}

TEST(RobotRender, RobotTrianglesMatchOracle) {
  const RobotModel& m = testing::dual_arm();
  const CameraModel cam = testing::sim_camera().resized(128, 96);
  const RobotRenderer renderer(m);
  const auto traj = synthetic_trajectory(m, 4, 3);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto tris = renderer.triangles(traj.frame(t), cam);
    bool in_front = true;
    for (const auto& tr : tris)
      for (const auto& v : tr.v) in_front = in_front && v.z() >= kRasterNearPlane;
    if (!in_front) continue;
    EXPECT_EQ(rasterize_triangles(tris, cam), oracle::raster(tris, cam)) << "frame " << t;
  }
}

}  // namespace
}  // namespace egodemo
