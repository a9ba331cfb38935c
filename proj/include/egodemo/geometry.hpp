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
#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace egodemo {

// Element of SE(3): x' = rotation * x + translation.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Eigen::Vector3d& t) {
    return {Eigen::Matrix3d::Identity(), t};
  }
  static RigidTransform from_rotation(const Eigen::Matrix3d& r) {
    return {r, Eigen::Vector3d::Zero()};
  }
  // Rotation about a unit axis through the origin.
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double angle);
  // URDF convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static RigidTransform from_xyz_rpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy);
  // Throws InvalidArgument unless the upper 3x3 block is a rotation (within
  // `tolerance`) and the last row is [0 0 0 1]. Values are stored unmodified.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m, double tolerance = 1e-6);

  const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
  const Eigen::Vector3d& translation() const noexcept { return translation_; }
  Eigen::Matrix4d matrix() const;

  RigidTransform inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation_ * point + translation_;
  }
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return rotation_ * v; }

  // Nearest rotation in the Frobenius sense (polar decomposition via SVD).
  RigidTransform orthonormalized() const;

  friend bool operator==(const RigidTransform& a, const RigidTransform& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Axis-angle vector (log map) of a rotation matrix.
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r);

// Distance between two poses: translation gap (m) and relative rotation angle (rad).
struct PoseError {
  double position = 0.0;
  double orientation = 0.0;
};
PoseError pose_error(const RigidTransform& a, const RigidTransform& b);

// Planar displacement of the robot base. dtheta is counterclockwise about +z
// seen from above, in radians.
struct EgoMotion {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  bool is_zero() const noexcept { return dx == 0.0 && dy == 0.0 && dtheta == 0.0; }
  friend bool operator==(const EgoMotion&, const EgoMotion&) = default;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ViewpointRange {
  Interval dx;      // m
  Interval dy;      // m
  Interval dtheta;  // rad

  void validate() const;

  // ±0.1 m in x and y, ±10 degrees in yaw.
  static ViewpointRange simulation();
  // The real platform cannot drive forward: x restricted to [-0.1, 0].
  static ViewpointRange real_robot();
  friend bool operator==(const ViewpointRange&, const ViewpointRange&) = default;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Change of coordinates from the old base frame to the displaced one: the new
// base sits at Trans(dx, dy, 0) * Rotz(dtheta) in the old frame, and the
// returned transform is its inverse.
RigidTransform ego_motion_to_base_transform(const EgoMotion& motion);

// Uniform sample per component, deterministic in `seed`.
EgoMotion sample_ego_motion(const ViewpointRange& range, std::uint64_t seed);

// Pinhole camera rigidly mounted on the robot base.
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  // Stored depth unit expressed in millimetres (1.0 for mm depth maps).
  double depth_unit_mm = 1.0;
  double depth_max = 0.0;  // m
  RigidTransform cam_from_base;

  // Metres per stored depth unit.
  double depth_scale() const noexcept { return depth_unit_mm * 1e-3; }
  Eigen::Matrix3d intrinsics() const;

  void validate() const;

  // Same optics at a different image size (intrinsics scaled per axis).
  CameraModel resized(int new_width, int new_height) const;

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

// Maps points from the source camera frame to the camera frame of the
// displaced base: cam_from_base * base_transform * cam_from_base^-1.
// Exactly the identity for zero motion.
RigidTransform camera_relative_transform(const CameraModel& camera, const EgoMotion& motion);

// Calibration document (JSON): fx, fy, cx, cy, width, height,
// depth_scale_mm_per_unit, depth_max_m, extrinsic (16 numbers, row-major
// 4x4 cam<-base). Doubles round-trip bit-exactly.
std::string camera_to_json(const CameraModel& camera);
CameraModel camera_from_json(const std::string& text, const std::string& source = "<string>");
void save_camera(const CameraModel& camera, const std::filesystem::path& path);
CameraModel load_camera(const std::filesystem::path& path);

}  // namespace egodemo
