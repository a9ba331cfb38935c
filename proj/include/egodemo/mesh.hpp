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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace egodemo {

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;             // m, link-local
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

struct MeshLoadResult {
  TriangleMesh mesh;
  std::size_t dropped_degenerate = 0;
};

// Triangles whose area is below this (m^2), or which repeat a vertex, are
// dropped on load.
constexpr double kDegenerateArea = 1e-14;

// Wavefront OBJ: v and f records (polygons fan-triangulated, negative and
// slash-separated indices accepted); everything else is ignored.
MeshLoadResult parse_obj(std::string_view text, const std::string& source = "<obj>");
// Binary or ASCII STL. Coincident vertices are merged.
MeshLoadResult parse_stl(std::string_view bytes, const std::string& source = "<stl>");
// Dispatches on the extension (.obj, .stl); anything else is a DataError.
MeshLoadResult load_mesh(const std::filesystem::path& path);

// Primitive tessellations, centred at the origin. Cylinders run along z.
TriangleMesh make_box(const Eigen::Vector3d& size);
TriangleMesh make_cylinder(double radius, double length, int segments = 24);
TriangleMesh make_sphere(double radius, int rings = 12, int segments = 24);

}  // namespace egodemo
