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

#include "egodemo/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "egodemo/error.hpp"

namespace egodemo {

namespace {

bool degenerate(const TriangleMesh& m, const std::array<std::uint32_t, 3>& t) {
  if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return true;
  const Eigen::Vector3d e1 = m.vertices[t[1]] - m.vertices[t[0]];
  const Eigen::Vector3d e2 = m.vertices[t[2]] - m.vertices[t[0]];
  return 0.5 * e1.cross(e2).norm() < kDegenerateArea;
}

void add_triangle(MeshLoadResult& r, const std::array<std::uint32_t, 3>& t) {
  if (degenerate(r.mesh, t)) {
    ++r.dropped_degenerate;
  } else {
    r.mesh.triangles.push_back(t);
  }
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    fn(line_no, line);
    pos = end + 1;
  }
}

}  // namespace

MeshLoadResult parse_obj(std::string_view text, const std::string& source) {
  MeshLoadResult r;
  for_each_line(text, [&](int line_no, std::string_view line) {
    const auto tok = tokens(line);
    if (tok.empty()) return;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError(source, line_no, "v", "vertex needs 3 coordinates");
      Eigen::Vector3d v;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[k + 1], v[k])) {
          throw ParseError(source, line_no, "v", "bad coordinate '" + std::string(tok[k + 1]) + "'");
        }
      }
      r.mesh.vertices.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError(source, line_no, "f", "face needs at least 3 vertices");
      std::vector<std::uint32_t> idx;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view s = tok[k].substr(0, tok[k].find('/'));
        long long i = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), i);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || i == 0) {
          throw ParseError(source, line_no, "f", "bad vertex index '" + std::string(tok[k]) + "'");
        }
        const long long n = static_cast<long long>(r.mesh.vertices.size());
        const long long resolved = i > 0 ? i - 1 : n + i;
        if (resolved < 0 || resolved >= n) {
          throw ParseError(source, line_no, "f", "vertex index " + std::to_string(i) + " out of range");
        }
        idx.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) add_triangle(r, {idx[0], idx[k], idx[k + 1]});
    }
  });
  return r;
}

MeshLoadResult parse_stl(std::string_view bytes, const std::string& source) {
  MeshLoadResult r;
  std::map<std::array<double, 3>, std::uint32_t> lookup;
  auto vertex = [&](const Eigen::Vector3d& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    auto [it, inserted] = lookup.emplace(key, static_cast<std::uint32_t>(r.mesh.vertices.size()));
    if (inserted) r.mesh.vertices.push_back(v);
    return it->second;
  };

  bool binary = false;
  if (bytes.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    binary = bytes.size() == 84 + 50ULL * count;
  }
  if (binary) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    for (std::uint32_t t = 0; t < count; ++t) {
      const char* rec = bytes.data() + 84 + 50ULL * t;
      std::array<std::uint32_t, 3> tri;
      for (int k = 0; k < 3; ++k) {
        float f[3];
        std::memcpy(f, rec + 12 + 12 * k, 12);
        tri[k] = vertex(Eigen::Vector3d(f[0], f[1], f[2]));
      }
      add_triangle(r, tri);
    }
    return r;
  }

  if (bytes.substr(0, 5) != "solid") {
    throw ParseError(source, 1, "", "neither binary STL nor ASCII STL");
  }
  std::vector<std::uint32_t> pending;
  int facet_line = 0;
  bool in_facet = false;
  for_each_line(bytes, [&](int line_no, std::string_view line) {
    const auto tok = tokens(line);
    if (tok.empty()) return;
    if (tok[0] == "facet") {
      if (in_facet) throw ParseError(source, line_no, "facet", "nested facet");
      in_facet = true;
      facet_line = line_no;
      pending.clear();
    } else if (tok[0] == "vertex") {
      if (!in_facet) throw ParseError(source, line_no, "vertex", "vertex outside facet");
      Eigen::Vector3d v;
      if (tok.size() != 4 || !parse_double(tok[1], v[0]) || !parse_double(tok[2], v[1]) ||
          !parse_double(tok[3], v[2])) {
        throw ParseError(source, line_no, "vertex", "vertex needs 3 numeric coordinates");
      }
      pending.push_back(vertex(v));
    } else if (tok[0] == "endfacet") {
      if (pending.size() != 3) {
        throw ParseError(source, facet_line, "facet", "facet has " + std::to_string(pending.size()) + " vertices");
      }
      add_triangle(r, {pending[0], pending[1], pending[2]});
      in_facet = false;
    }
  });
  if (in_facet) throw ParseError(source, facet_line, "facet", "unterminated facet");
  return r;
}

MeshLoadResult load_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext != ".obj" && ext != ".stl") throw DataError("unsupported mesh format '" + ext + "': " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing mesh file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  return ext == ".obj" ? parse_obj(data, path.string()) : parse_stl(data, path.string());
}

TriangleMesh make_box(const Eigen::Vector3d& size) {
  TriangleMesh m;
  const Eigen::Vector3d h = 0.5 * size;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriangleMesh make_cylinder(double radius, double length, int segments) {
  TriangleMesh m;
  const double hz = 0.5 * length;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, -hz);
  m.vertices.emplace_back(0.0, 0.0, hz);
  for (int i = 0; i < segments; ++i) {
    const auto a0 = static_cast<std::uint32_t>(2 * i);
    const auto a1 = static_cast<std::uint32_t>(2 * ((i + 1) % segments));
    m.triangles.push_back({a0, a1, a0 + 1});
    m.triangles.push_back({a1, a1 + 1, a0 + 1});
    m.triangles.push_back({bottom, a1, a0});
    m.triangles.push_back({bottom + 1, a0 + 1, a1 + 1});
  }
  return m;
}

TriangleMesh make_sphere(double radius, int rings, int segments) {
  TriangleMesh m;
  const double pi = 3.14159265358979323846;
  m.vertices.emplace_back(0.0, 0.0, radius);
  for (int r = 1; r < rings; ++r) {
    const double phi = pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double th = 2.0 * pi * s / segments;
      m.vertices.emplace_back(radius * std::sin(phi) * std::cos(th), radius * std::sin(phi) * std::sin(th),
                              radius * std::cos(phi));
    }
  }
  m.vertices.emplace_back(0.0, 0.0, -radius);
  const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto at = [&](int r, int s) { return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments)); };
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({0, at(1, s), at(1, s + 1)});
    for (int r = 1; r + 1 < rings; ++r) {
      m.triangles.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      m.triangles.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
    m.triangles.push_back({south, at(rings - 1, s + 1), at(rings - 1, s)});
  }
  return m;
}

}  // namespace egodemo
