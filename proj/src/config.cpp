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

#include "egodemo/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "egodemo/error.hpp"

namespace egodemo {

using nlohmann::json;

void PipelineConfig::validate() const {
  retarget.validate();
  if (dilation_radius < 0) throw InvalidArgument("dilation radius must be >= 0");
  if (render.supersample < 1) throw InvalidArgument("supersample factor must be >= 1");
}

namespace {

json schedule_json(const IkSchedule& s) {
  json stages = json::array();
  for (const auto& st : s.stages) {
    stages.push_back({{"position_tolerance_m", st.position_tolerance},
                      {"orientation_tolerance_rad", st.orientation_tolerance},
                      {"max_iterations", st.max_iterations}});
  }
  json j;
  j["stages"] = stages;
  j["restarts"] = s.restarts;
  j["damping"] = {{"initial", s.damping.initial},
                  {"increase", s.damping.increase},
                  {"decrease", s.damping.decrease},
                  {"min", s.damping.min},
                  {"max", s.damping.max}};
  j["joint_mask"] = s.joint_mask;
  return j;
}

void apply_schedule(IkSchedule& s, const json& j) {
  if (j.contains("stages")) {
    s.stages.clear();
    for (const auto& st : j.at("stages")) {
      s.stages.push_back({st.at("position_tolerance_m").get<double>(),
                          st.at("orientation_tolerance_rad").get<double>(), st.at("max_iterations").get<int>()});
    }
  }
  if (j.contains("restarts")) s.restarts = j.at("restarts").get<int>();
  if (j.contains("damping")) {
    const json& d = j.at("damping");
    s.damping.initial = d.value("initial", s.damping.initial);
    s.damping.increase = d.value("increase", s.damping.increase);
    s.damping.decrease = d.value("decrease", s.damping.decrease);
    s.damping.min = d.value("min", s.damping.min);
    s.damping.max = d.value("max", s.damping.max);
  }
  if (j.contains("joint_mask")) s.joint_mask = j.at("joint_mask").get<std::vector<bool>>();
}

Interval interval(const json& j, double scale) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("range entries must be [lower, upper]");
  return {j[0].get<double>() * scale, j[1].get<double>() * scale};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string PipelineConfig::to_json() const {
  json j;
  j["dilation_radius"] = dilation_radius;
  j["supersample"] = render.supersample;
  j["retarget"] = {{"smoothing_window", retarget.smoothing_window},
                   {"max_failure_fraction", retarget.max_failure_fraction},
                   {"warm_start", retarget.warm_start},
                   {"schedule", schedule_json(retarget.schedule)}};
  return j.dump();
}

Profile builtin_profile(const std::string& name) {
  Profile p;
  p.name = name;
  if (name == "sim") {
    p.width = 320;
    p.height = 240;
    p.range = ViewpointRange::simulation();
  } else if (name == "real") {
    p.width = 640;
    p.height = 480;
    p.range = ViewpointRange::real_robot();
  } else {
    throw InvalidArgument("unknown profile '" + name + "' (expected sim or real)");
  }
  return p;
}

Profile profile_from_json(const std::string& text, const std::string& source) {
  try {
    const json j = json::parse(text);
    Profile p = builtin_profile(j.value("base", std::string("sim")));
    p.name = j.value("name", p.name);
    p.width = j.value("width", p.width);
    p.height = j.value("height", p.height);
    if (j.contains("range")) {
      const json& r = j.at("range");
      if (r.contains("dx")) p.range.dx = interval(r.at("dx"), 1.0);
      if (r.contains("dy")) p.range.dy = interval(r.at("dy"), 1.0);
      if (r.contains("dtheta_deg")) p.range.dtheta = interval(r.at("dtheta_deg"), deg_to_rad(1.0));
    }
    p.pipeline.dilation_radius = j.value("dilation_radius", p.pipeline.dilation_radius);
    p.pipeline.render.supersample = j.value("supersample", p.pipeline.render.supersample);
    if (j.contains("retarget")) {
      const json& r = j.at("retarget");
      RetargetOptions& o = p.pipeline.retarget;
      o.smoothing_window = r.value("smoothing_window", o.smoothing_window);
      o.max_failure_fraction = r.value("max_failure_fraction", o.max_failure_fraction);
      o.warm_start = r.value("warm_start", o.warm_start);
      if (r.contains("schedule")) apply_schedule(o.schedule, r.at("schedule"));
    }
    if (p.width <= 0 || p.height <= 0) throw InvalidArgument("profile image size must be positive");
    p.range.validate();
    p.pipeline.validate();
    return p;
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(source + ": " + e.what());
  }
}

Profile resolve_profile(const std::string& name_or_path) {
  if (name_or_path == "sim" || name_or_path == "real") return builtin_profile(name_or_path);
  return profile_from_json(read_file(name_or_path), name_or_path);
}

IkSchedule schedule_from_json(const std::string& text, const std::string& source) {
  try {
    IkSchedule s = IkSchedule::defaults();
    apply_schedule(s, json::parse(text));
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(source + ": " + e.what());
  }
}

IkSchedule load_schedule(const std::filesystem::path& path) {
  return schedule_from_json(read_file(path), path.string());
}

std::string schedule_to_json(const IkSchedule& schedule) { return schedule_json(schedule).dump(2) + "\n"; }

}  // namespace egodemo
