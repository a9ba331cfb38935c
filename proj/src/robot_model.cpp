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

#include "egodemo/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <expat.h>
#include <json.hpp>

#include "egodemo/error.hpp"

namespace egodemo {

std::string_view to_string(Arm arm) { return arm == Arm::kLeft ? "left" : "right"; }

namespace {

struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<XmlElement>> children;
  int line = 0;

  const std::string* attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }
  const XmlElement* child(const std::string& n) const {
    for (const auto& c : children)
      if (c->name == n) return c.get();
    return nullptr;
  }
};

struct XmlBuilder {
  std::unique_ptr<XmlElement> root;
  std::vector<XmlElement*> stack;
  XML_Parser parser = nullptr;
};

void on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* b = static_cast<XmlBuilder*>(data);
  auto el = std::make_unique<XmlElement>();
  el->name = name;
  el->line = static_cast<int>(XML_GetCurrentLineNumber(b->parser));
  for (int i = 0; atts[i] != nullptr; i += 2) el->attrs[atts[i]] = atts[i + 1];
  XmlElement* raw = el.get();
  if (b->stack.empty()) {
    b->root = std::move(el);
  } else {
    b->stack.back()->children.push_back(std::move(el));
  }
  b->stack.push_back(raw);
}

void on_end(void* data, const XML_Char*) { static_cast<XmlBuilder*>(data)->stack.pop_back(); }

std::unique_ptr<XmlElement> parse_xml(std::string_view text, const std::string& source) {
  XmlBuilder b;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw IoError("cannot allocate XML parser");
  b.parser = parser.get();
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ParseError(source, static_cast<int>(XML_GetCurrentLineNumber(parser.get())), "",
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!b.root) throw ParseError(source, 0, "", "empty document");
  return std::move(b.root);
}

class UrdfReader {
 public:
  UrdfReader(std::string source, std::filesystem::path base_dir)
      : source_(std::move(source)), base_dir_(std::move(base_dir)) {}

  UrdfDocument read(const XmlElement& root) {
    if (root.name != "robot") fail(root, "root element must be <robot>");
    if (const auto* n = root.attr("name")) doc_.name = *n;
    for (const auto& c : root.children) {
      if (c->name == "material") read_material(*c);
    }
    for (const auto& c : root.children) {
      if (c->name == "link") {
        read_link(*c);
      } else if (c->name == "joint") {
        read_joint(*c);
      } else if (c->name != "material") {
        warn(*c, "unsupported element ignored");
      }
    }
    resolve_links();
    return std::move(doc_);
  }

 private:
  [[noreturn]] void fail(const XmlElement& el, const std::string& detail) const {
    throw ParseError(source_, el.line, el.name, detail);
  }

  void warn(const XmlElement& el, const std::string& detail) {
    doc_.warnings.push_back(source_ + ":" + std::to_string(el.line) + ": <" + el.name + ">: " + detail);
  }

  const std::string& require_attr(const XmlElement& el, const std::string& key) const {
    const auto* v = el.attr(key);
    if (v == nullptr) fail(el, "missing attribute '" + key + "'");
    return *v;
  }

  std::vector<double> numbers(const XmlElement& el, const std::string& text, std::size_t count) const {
    std::istringstream ss(text);
    ss.imbue(std::locale::classic());
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof() || out.size() != count) {
      fail(el, "expected " + std::to_string(count) + " numbers, got '" + text + "'");
    }
    for (double d : out)
      if (!std::isfinite(d)) fail(el, "non-finite number in '" + text + "'");
    return out;
  }

  double number_attr(const XmlElement& el, const std::string& key) const {
    return numbers(el, require_attr(el, key), 1)[0];
  }

  Eigen::Vector3d vec3(const XmlElement& el, const std::string& key, const Eigen::Vector3d& def) const {
    const auto* v = el.attr(key);
    if (v == nullptr) return def;
    const auto n = numbers(el, *v, 3);
    return {n[0], n[1], n[2]};
  }

  RigidTransform origin(const XmlElement* el) const {
    if (el == nullptr) return RigidTransform::identity();
    return RigidTransform::from_xyz_rpy(vec3(*el, "xyz", Eigen::Vector3d::Zero()),
                                        vec3(*el, "rpy", Eigen::Vector3d::Zero()));
  }

  Eigen::Vector3d color(const XmlElement& el) const {
    const auto n = numbers(el, require_attr(el, "rgba"), 4);
    return {n[0], n[1], n[2]};
  }

  void read_material(const XmlElement& el) {
    const auto& name = require_attr(el, "name");
    if (const auto* c = el.child("color")) materials_[name] = color(*c);
  }

  std::optional<Eigen::Vector3d> material(const XmlElement& el) const {
    if (const auto* c = el.child("color")) return color(*c);
    if (const auto* n = el.attr("name")) {
      auto it = materials_.find(*n);
      if (it != materials_.end()) return it->second;
    }
    return std::nullopt;
  }

  VisualGeometry geometry(const XmlElement& el) const {
    if (el.children.size() != 1) fail(el, "expected exactly one shape");
    const XmlElement& g = *el.children.front();
    if (g.name == "mesh") {
      std::string file = require_attr(g, "filename");
      if (file.rfind("package://", 0) == 0) fail(g, "package:// URIs are not supported");
      if (file.rfind("file://", 0) == 0) file = file.substr(7);
      MeshFile m;
      std::filesystem::path p(file);
      m.path = p.is_absolute() ? p : base_dir_ / p;
      m.scale = vec3(g, "scale", Eigen::Vector3d::Ones());
      return m;
    }
    if (g.name == "box") {
      return BoxShape{vec3(g, "size", Eigen::Vector3d::Ones())};
    }
    if (g.name == "cylinder") {
      return CylinderShape{number_attr(g, "radius"), number_attr(g, "length")};
    }
    if (g.name == "sphere") {
      return SphereShape{number_attr(g, "radius")};
    }
    fail(g, "unsupported geometry");
  }

  void read_link(const XmlElement& el) {
    Link link;
    link.name = require_attr(el, "name");
    for (const auto& c : el.children) {
      if (c->name == "visual") {
        LinkVisual v;
        v.origin = origin(c->child("origin"));
        const XmlElement* g = c->child("geometry");
        if (g == nullptr) fail(*c, "visual without <geometry>");
        v.geometry = geometry(*g);
        if (const auto* m = c->child("material")) v.color = material(*m);
        link.visuals.push_back(std::move(v));
      } else if (c->name != "collision" && c->name != "inertial") {
        warn(*c, "unsupported link element ignored");
      }
    }
    doc_.links.push_back(std::move(link));
    link_lines_.push_back(el.line);
  }

  void read_joint(const XmlElement& el) {
    Joint j;
    j.name = require_attr(el, "name");
    const auto& type = require_attr(el, "type");
    if (type == "revolute" || type == "continuous") {
      j.type = JointType::kRevolute;
    } else if (type == "prismatic") {
      j.type = JointType::kPrismatic;
    } else if (type == "fixed") {
      j.type = JointType::kFixed;
    } else {
      fail(el, "unsupported joint type '" + type + "'");
    }
    const XmlElement* parent = el.child("parent");
    const XmlElement* child = el.child("child");
    if (parent == nullptr || child == nullptr) fail(el, "joint needs <parent> and <child>");
    parent_names_.push_back(require_attr(*parent, "link"));
    child_names_.push_back(require_attr(*child, "link"));
    j.origin = origin(el.child("origin"));
    if (const auto* a = el.child("axis")) {
      j.axis = vec3(*a, "xyz", Eigen::Vector3d::UnitX());
      if (j.axis.norm() < 1e-12) fail(*a, "zero joint axis");
      j.axis.normalize();
    }
    if (const auto* l = el.child("limit"); l != nullptr && type != "continuous" && j.type != JointType::kFixed) {
      if (l->attr("lower") != nullptr && l->attr("upper") != nullptr) {
        j.lower = number_attr(*l, "lower");
        j.upper = number_attr(*l, "upper");
        if (!(j.lower < j.upper)) fail(*l, "joint limit requires lower < upper");
        j.has_limits = true;
      }
    }
    if (el.child("mimic") != nullptr) warn(*el.child("mimic"), "mimic joints are not supported; ignored");
    for (const auto& c : el.children) {
      static const std::set<std::string> known{"parent", "child", "origin", "axis", "limit", "mimic",
                                               "dynamics", "safety_controller", "calibration"};
      if (!known.count(c->name)) warn(*c, "unsupported joint element ignored");
    }
    doc_.joints.push_back(std::move(j));
    joint_lines_.push_back(el.line);
  }

  // Joint parent/child names are resolved after all links are known.
  void resolve_links() {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < doc_.links.size(); ++i) {
      if (!index.emplace(doc_.links[i].name, static_cast<int>(i)).second) {
        throw ParseError(source_, link_lines_[i], "link", "duplicate link '" + doc_.links[i].name + "'");
      }
    }
    std::set<std::string> joint_names;
    for (std::size_t i = 0; i < doc_.joints.size(); ++i) {
      Joint& j = doc_.joints[i];
      if (!joint_names.insert(j.name).second) {
        throw ParseError(source_, joint_lines_[i], "joint", "duplicate joint '" + j.name + "'");
      }
      auto p = index.find(parent_names_[i]);
      auto c = index.find(child_names_[i]);
      if (p == index.end() || c == index.end()) {
        const std::string& missing = p == index.end() ? parent_names_[i] : child_names_[i];
        throw ParseError(source_, joint_lines_[i], "joint",
                         "joint '" + j.name + "' references unknown link '" + missing + "'");
      }
      j.parent = p->second;
      j.child = c->second;
    }
  }

  std::string source_;
  std::filesystem::path base_dir_;
  UrdfDocument doc_;
  std::map<std::string, Eigen::Vector3d> materials_;
  std::vector<std::string> parent_names_;
  std::vector<std::string> child_names_;
  std::vector<int> link_lines_;
  std::vector<int> joint_lines_;
};

}  // namespace

UrdfDocument parse_urdf(std::string_view xml, const std::string& source,
                        const std::filesystem::path& base_dir) {
  const auto root = parse_xml(xml, source);
  UrdfReader reader(source, base_dir);
  return reader.read(*root);
}

RobotModel::RobotModel(UrdfDocument doc, const RobotDescription& desc)
    : name_(std::move(doc.name)),
      links_(std::move(doc.links)),
      joints_(std::move(doc.joints)),
      warnings_(std::move(doc.warnings)) {
  if (links_.empty()) throw DataError("robot has no links");
  parent_joint_.assign(links_.size(), -1);
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const int child = joints_[j].child;
    if (parent_joint_[child] != -1) {
      throw DataError("link '" + links_[child].name + "' has two parents (joints '" +
                      joints_[parent_joint_[child]].name + "' and '" + joints_[j].name + "')");
    }
    parent_joint_[child] = static_cast<int>(j);
  }

  // Walking up from every link must terminate at a root.
  for (std::size_t start = 0; start < links_.size(); ++start) {
    std::vector<int> path;
    std::set<int> seen{static_cast<int>(start)};
    int link = static_cast<int>(start);
    while (parent_joint_[link] != -1) {
      const int j = parent_joint_[link];
      path.push_back(j);
      link = joints_[j].parent;
      if (!seen.insert(link).second) {
        // Report only the joints on the cycle itself.
        std::string names;
        auto it = path.begin();
        while (joints_[*it].child != link) ++it;
        for (; it != path.end(); ++it) names += (names.empty() ? "" : ", ") + joints_[*it].name;
        throw DataError("kinematic cycle detected through joints: " + names);
      }
    }
  }

  std::vector<int> roots;
  for (std::size_t l = 0; l < links_.size(); ++l)
    if (parent_joint_[l] == -1) roots.push_back(static_cast<int>(l));
  if (roots.size() != 1) {
    std::string names;
    for (int r : roots) names += (names.empty() ? "" : ", ") + links_[r].name;
    throw DataError("joint graph must be a single tree; roots: " + names);
  }
  base_link_ = roots.front();
  if (!desc.base_link.empty() && links_[base_link_].name != desc.base_link) {
    throw DataError("base link '" + desc.base_link + "' is not the tree root ('" +
                    links_[base_link_].name + "')");
  }

  // Breadth-first order from the base.
  std::vector<std::vector<int>> children(links_.size());
  for (std::size_t j = 0; j < joints_.size(); ++j) children[joints_[j].parent].push_back(static_cast<int>(j));
  std::vector<int> frontier{base_link_};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    for (int j : children[frontier[head]]) {
      traversal_.push_back(j);
      frontier.push_back(joints_[j].child);
    }
  }

  if (!desc.left && !desc.right) throw DataError("robot config defines no arms");
  int offset = 0;
  if (desc.left) {
    arms_[0] = build_chain(*desc.left, "left");
    layout_.arm_offset[0] = offset;
    layout_.gripper_offset[0] = offset + arms_[0]->dof();
    offset += arms_[0]->dof() + 1;
  }
  if (desc.right) {
    arms_[1] = build_chain(*desc.right, "right");
    layout_.arm_offset[1] = offset;
    layout_.gripper_offset[1] = offset + arms_[1]->dof();
    offset += arms_[1]->dof() + 1;
  }
  layout_.size = offset;
}

int RobotModel::link_index(std::string_view name) const {
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].name == name) return static_cast<int>(i);
  throw DataError("unknown link '" + std::string(name) + "'");
}

int RobotModel::joint_index(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i)
    if (joints_[i].name == name) return static_cast<int>(i);
  throw DataError("unknown joint '" + std::string(name) + "'");
}

const ArmChain& RobotModel::arm(Arm arm) const {
  const auto& a = arms_[static_cast<int>(arm)];
  if (!a) throw InvalidArgument("robot has no " + std::string(to_string(arm)) + " arm");
  return *a;
}

ArmChain RobotModel::build_chain(const ArmDescription& desc, const std::string& side) const {
  ArmChain chain;
  chain.mount_link = desc.mount_link;
  chain.ee_link = desc.ee_link;
  const int mount = link_index(desc.mount_link);
  const int ee = link_index(desc.ee_link);

  // Mount pose: base -> mount through fixed joints only.
  std::vector<int> up;
  for (int l = mount; parent_joint_[l] != -1; l = joints_[parent_joint_[l]].parent) up.push_back(parent_joint_[l]);
  for (auto it = up.rbegin(); it != up.rend(); ++it) {
    const Joint& j = joints_[*it];
    if (j.type != JointType::kFixed) {
      throw DataError(side + " arm mount '" + desc.mount_link + "' is attached through movable joint '" +
                      j.name + "'");
    }
    chain.mount_pose = chain.mount_pose * j.origin;
  }

  // Chain: mount -> ee.
  std::vector<int> path;
  int l = ee;
  while (l != mount) {
    if (parent_joint_[l] == -1) {
      throw DataError(side + " arm end-effector '" + desc.ee_link + "' is not below mount '" +
                      desc.mount_link + "'");
    }
    path.push_back(parent_joint_[l]);
    l = joints_[parent_joint_[l]].parent;
  }
  std::reverse(path.begin(), path.end());

  std::size_t next = 0;
  for (int j : path) {
    const Joint& joint = joints_[j];
    ChainSegment seg;
    seg.origin = joint.origin;
    seg.type = joint.type;
    seg.axis = joint.axis;
    if (joint.type != JointType::kFixed) {
      if (next >= desc.joints.size() || desc.joints[next] != joint.name) {
        throw DataError(side + " arm chain joint '" + joint.name +
                        "' does not match the configured actuated joint list");
      }
      if (!joint.has_limits) {
        throw DataError("actuated joint '" + joint.name + "' is missing finite limits");
      }
      seg.actuated = static_cast<int>(next++);
      chain.joints.push_back(j);
    }
    chain.segments.push_back(seg);
  }
  if (next != desc.joints.size()) {
    throw DataError(side + " arm joint '" + desc.joints[next] + "' is not on the chain from '" +
                    desc.mount_link + "' to '" + desc.ee_link + "'");
  }
  if (chain.joints.empty()) throw DataError(side + " arm has no actuated joints");

  chain.lower.resize(chain.dof());
  chain.upper.resize(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    chain.lower[i] = joints_[chain.joints[i]].lower;
    chain.upper[i] = joints_[chain.joints[i]].upper;
  }
  for (const auto& g : desc.gripper) {
    const int j = joint_index(g.joint);
    if (joints_[j].type == JointType::kFixed) {
      throw DataError("gripper joint '" + g.joint + "' is fixed");
    }
    chain.gripper.emplace_back(j, g.multiplier);
  }
  return chain;
}

RobotModel parse_robot_model(std::string_view urdf_xml, const RobotDescription& desc, const std::string& source,
                             const std::filesystem::path& base_dir) {
  return RobotModel(parse_urdf(urdf_xml, source, base_dir), desc);
}

namespace {

ArmDescription read_arm_spec(const nlohmann::json& j, const std::string& source, const std::string& side) {
  auto req = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ParseError(source, 0, side + "." + key, "missing key");
    return j.at(key);
  };
  ArmDescription a;
  try {
    a.mount_link = req("mount_link").get<std::string>();
    a.ee_link = req("ee_link").get<std::string>();
    a.joints = req("joints").get<std::vector<std::string>>();
    if (j.contains("gripper")) {
      for (const auto& g : j.at("gripper")) {
        a.gripper.push_back({g.at("joint").get<std::string>(), g.value("multiplier", 1.0)});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, side, e.what());
  }
  return a;
}

}  // namespace

RobotModel load_robot_model(const std::filesystem::path& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw DataError("cannot open robot config " + config_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(config_path.string(), 0, "", e.what());
  }
  const std::string source = config_path.string();
  if (!j.contains("urdf") || !j["urdf"].is_string()) throw ParseError(source, 0, "urdf", "missing key");
  RobotDescription desc;
  desc.base_link = j.value("base_link", std::string{});
  if (j.contains("arms")) {
    const auto& arms = j["arms"];
    if (arms.contains("left")) desc.left = read_arm_spec(arms["left"], source, "left");
    if (arms.contains("right")) desc.right = read_arm_spec(arms["right"], source, "right");
  }
  std::filesystem::path urdf_path(j["urdf"].get<std::string>());
  if (urdf_path.is_relative()) urdf_path = config_path.parent_path() / urdf_path;
  std::ifstream uin(urdf_path, std::ios::binary);
  if (!uin) throw DataError("cannot open URDF " + urdf_path.string());
  std::stringstream ss;
  ss << uin.rdbuf();
  return parse_robot_model(ss.str(), desc, urdf_path.string(), urdf_path.parent_path());
}

}  // namespace egodemo
