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

#include "egodemo/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>
#include <json.hpp>

#include "egodemo/error.hpp"
#include "egodemo/random.hpp"

namespace egodemo {

using nlohmann::json;

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  return from_rotation(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

RigidTransform RigidTransform::from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy) {
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return {r, xyz};
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m, double tolerance) {
  if (!m.allFinite()) throw InvalidArgument("transform matrix has non-finite entries");
  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > tolerance || std::abs(r.determinant() - 1.0) > tolerance) {
    throw InvalidArgument("transform rotation block is not a proper rotation");
  }
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw InvalidArgument("transform last row must be [0 0 0 1]");
  }
  return {r, m.topRightCorner<3, 1>()};
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
}

RigidTransform RigidTransform::orthonormalized() const {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return {u * v.transpose(), translation_};
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

PoseError pose_error(const RigidTransform& a, const RigidTransform& b) {
  PoseError e;
  e.position = (a.translation() - b.translation()).norm();
  e.orientation = rotation_log(a.rotation() * b.rotation().transpose()).norm();
  return e;
}

void ViewpointRange::validate() const {
  for (const Interval* iv : {&dx, &dy, &dtheta}) {
    if (!std::isfinite(iv->lower) || !std::isfinite(iv->upper) || iv->lower > iv->upper) {
      throw InvalidArgument("viewpoint range interval must satisfy lower <= upper");
    }
  }
}

ViewpointRange ViewpointRange::simulation() {
  return {{-0.1, 0.1}, {-0.1, 0.1}, {deg_to_rad(-10.0), deg_to_rad(10.0)}};
}

ViewpointRange ViewpointRange::real_robot() {
  return {{-0.1, 0.0}, {-0.1, 0.1}, {deg_to_rad(-10.0), deg_to_rad(10.0)}};
}

RigidTransform ego_motion_to_base_transform(const EgoMotion& motion) {
  const double c = std::cos(motion.dtheta);
  const double s = std::sin(motion.dtheta);
  Eigen::Matrix3d r;
  r << c, s, 0.0,  //
      -s, c, 0.0,  //
      0.0, 0.0, 1.0;
  const Eigen::Vector3d t(-(c * motion.dx + s * motion.dy), -(-s * motion.dx + c * motion.dy), 0.0);
  return {r, t};
}

EgoMotion sample_ego_motion(const ViewpointRange& range, std::uint64_t seed) {
  range.validate();
  Rng rng(seed);
  EgoMotion m;
  m.dx = uniform(rng, range.dx.lower, range.dx.upper);
  m.dy = uniform(rng, range.dy.lower, range.dy.upper);
  m.dtheta = uniform(rng, range.dtheta.lower, range.dtheta.upper);
  return m;
}

Eigen::Matrix3d CameraModel::intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx,  //
      0.0, fy, cy,   //
      0.0, 0.0, 1.0;
  return k;
}

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("camera width/height must be positive");
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidArgument("camera focal lengths must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw InvalidArgument("camera principal point must lie inside the image");
  }
  if (!(depth_unit_mm > 0.0) || !std::isfinite(depth_unit_mm)) {
    throw InvalidArgument("camera depth scale must be positive");
  }
  if (!(depth_max > 0.0) || !std::isfinite(depth_max)) {
    throw InvalidArgument("camera max depth must be positive");
  }
}

CameraModel CameraModel::resized(int new_width, int new_height) const {
  CameraModel c = *this;
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  c.width = new_width;
  c.height = new_height;
  c.fx = fx * sx;
  c.fy = fy * sy;
  c.cx = (cx + 0.5) * sx - 0.5;
  c.cy = (cy + 0.5) * sy - 0.5;
  return c;
}

RigidTransform camera_relative_transform(const CameraModel& camera, const EgoMotion& motion) {
  if (motion.is_zero()) return RigidTransform::identity();
  const RigidTransform& cam = camera.cam_from_base;
  return cam * ego_motion_to_base_transform(motion) * cam.inverse();
}

std::string camera_to_json(const CameraModel& camera) {
  json j;
  j["fx"] = camera.fx;
  j["fy"] = camera.fy;
  j["cx"] = camera.cx;
  j["cy"] = camera.cy;
  j["width"] = camera.width;
  j["height"] = camera.height;
  j["depth_scale_mm_per_unit"] = camera.depth_unit_mm;
  j["depth_max_m"] = camera.depth_max;
  const Eigen::Matrix4d m = camera.cam_from_base.matrix();
  json ext = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ext.push_back(m(r, c));
  j["extrinsic"] = ext;
  return j.dump(2) + "\n";
}

namespace {

double require_number(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ParseError(source, 0, key, "missing key");
  if (!j.at(key).is_number()) throw ParseError(source, 0, key, "expected a number");
  return j.at(key).get<double>();
}

int require_int(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ParseError(source, 0, key, "missing key");
  if (!j.at(key).is_number_integer()) throw ParseError(source, 0, key, "expected an integer");
  return j.at(key).get<int>();
}

}  // namespace

CameraModel camera_from_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, "", e.what());
  }
  if (!j.is_object()) throw ParseError(source, 0, "", "calibration must be a JSON object");
  CameraModel c;
  c.fx = require_number(j, "fx", source);
  c.fy = require_number(j, "fy", source);
  c.cx = require_number(j, "cx", source);
  c.cy = require_number(j, "cy", source);
  c.width = require_int(j, "width", source);
  c.height = require_int(j, "height", source);
  c.depth_unit_mm = require_number(j, "depth_scale_mm_per_unit", source);
  c.depth_max = require_number(j, "depth_max_m", source);
  if (!j.contains("extrinsic") || !j["extrinsic"].is_array() || j["extrinsic"].size() != 16) {
    throw ParseError(source, 0, "extrinsic", "expected 16 numbers (row-major 4x4)");
  }
  Eigen::Matrix4d m;
  for (int i = 0; i < 16; ++i) {
    const json& v = j["extrinsic"][i];
    if (!v.is_number()) throw ParseError(source, 0, "extrinsic", "non-numeric entry");
    m(i / 4, i % 4) = v.get<double>();
  }
  try {
    c.cam_from_base = RigidTransform::from_matrix(m);
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(source, 0, "", e.what());
  }
  return c;
}

void save_camera(const CameraModel& camera, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << camera_to_json(camera);
}

CameraModel load_camera(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing calibration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return camera_from_json(ss.str(), path.string());
}

}  // namespace egodemo
