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

#include "egodemo/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "egodemo/error.hpp"
#include "egodemo/kinematics.hpp"

namespace egodemo {

JointTrajectory::JointTrajectory(int channels) : channels_(channels) {
  if (channels <= 0) throw InvalidArgument("trajectory needs at least one channel");
}

void JointTrajectory::push_back(std::span<const double> frame) {
  if (static_cast<int>(frame.size()) != channels_) {
    throw InvalidArgument("frame has " + std::to_string(frame.size()) + " channels, expected " +
                          std::to_string(channels_));
  }
  if (has_timestamps()) throw InvalidArgument("trajectory carries timestamps; push a timestamp too");
  values_.insert(values_.end(), frame.begin(), frame.end());
}

void JointTrajectory::push_back(std::span<const double> frame, double timestamp) {
  if (!empty() && !has_timestamps()) throw InvalidArgument("trajectory has no timestamps");
  if (static_cast<int>(frame.size()) != channels_) {
    throw InvalidArgument("frame has " + std::to_string(frame.size()) + " channels, expected " +
                          std::to_string(channels_));
  }
  values_.insert(values_.end(), frame.begin(), frame.end());
  timestamps_.push_back(timestamp);
}

void JointTrajectory::set_timestamps(std::vector<double> timestamps) {
  if (!timestamps.empty() && timestamps.size() != size()) {
    throw InvalidArgument("timestamp count does not match frame count");
  }
  timestamps_ = std::move(timestamps);
}

void validate_trajectory(const RobotModel& model, const JointTrajectory& trajectory) {
  if (trajectory.empty()) throw DataError("trajectory has no frames");
  if (trajectory.channels() != model.config_size()) {
    throw DataError("trajectory has " + std::to_string(trajectory.channels()) + " channels, robot expects " +
                    std::to_string(model.config_size()));
  }
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto f = trajectory.frame(t);
    for (double v : f) {
      if (!std::isfinite(v)) throw DataError("frame " + std::to_string(t) + ": non-finite joint value");
    }
    for (Arm arm : kArms) {
      if (!model.has_arm(arm)) continue;
      try {
        check_joint_limits(model, arm, arm_joints(model, f, arm));
      } catch (const InvalidArgument& e) {
        throw DataError("frame " + std::to_string(t) + ": " + e.what());
      }
    }
  }
}

namespace {

std::vector<std::string> channel_names(int channels) {
  if (channels < 4 || channels % 2 != 0) {
    throw InvalidArgument("trajectory channel count must be 2 * (arm dof + 1)");
  }
  const int dof = channels / 2 - 1;
  std::vector<std::string> names;
  for (const char* side : {"left", "right"}) {
    for (int i = 1; i <= dof; ++i) names.push_back(std::string(side) + "_joint" + std::to_string(i));
    names.push_back(std::string(side) + "_gripper");
  }
  return names;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string trajectory_to_csv(const JointTrajectory& trajectory) {
  const auto names = channel_names(trajectory.channels());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  if (trajectory.has_timestamps()) out += ",timestamp";
  out += '\n';
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto f = trajectory.frame(t);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) out += ',';
      append_number(out, f[i]);
    }
    if (trajectory.has_timestamps()) {
      out += ',';
      append_number(out, trajectory.timestamps()[t]);
    }
    out += '\n';
  }
  return out;
}

JointTrajectory trajectory_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "", "missing header row");
  const auto header = split(line, ',');
  int ts_column = -1;
  std::vector<std::string> channels;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "timestamp") {
      ts_column = static_cast<int>(i);
    } else {
      channels.push_back(header[i]);
    }
  }
  std::vector<std::string> expected;
  try {
    expected = channel_names(static_cast<int>(channels.size()));
  } catch (const InvalidArgument& e) {
    throw ParseError(source, 1, "", e.what());
  }
  std::map<std::string, int> position;
  for (std::size_t i = 0; i < expected.size(); ++i) position[expected[i]] = static_cast<int>(i);
  // column -> canonical channel index (-1 for timestamp)
  std::vector<int> target(header.size(), -1);
  std::vector<bool> seen(expected.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == ts_column) continue;
    auto it = position.find(header[c]);
    if (it == position.end()) throw ParseError(source, 1, "", "unknown column '" + header[c] + "'");
    if (seen[it->second]) throw ParseError(source, 1, "", "duplicate column '" + header[c] + "'");
    seen[it->second] = true;
    target[c] = it->second;
  }

  JointTrajectory traj(static_cast<int>(expected.size()));
  std::vector<double> frame(expected.size());
  std::vector<double> stamps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError(source, line_no, "", "expected " + std::to_string(header.size()) + " columns, got " +
                                                std::to_string(cells.size()));
    }
    double ts = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto& s = cells[c];
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(source, line_no, "", "not a number: '" + s + "'");
      }
      if (target[c] < 0) {
        ts = v;
      } else {
        frame[target[c]] = v;
      }
    }
    traj.push_back(frame);
    if (ts_column >= 0) stamps.push_back(ts);
  }
  if (ts_column >= 0) traj.set_timestamps(std::move(stamps));
  return traj;
}

void save_trajectory(const JointTrajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << trajectory_to_csv(trajectory);
}

JointTrajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing trajectory file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return trajectory_from_csv(ss.str(), path.string());
}

}  // namespace egodemo
