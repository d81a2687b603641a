#include "reachspan/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reachspan {

using nlohmann::json;

namespace {

Eigen::Vector3d read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error(where + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number())
      throw std::runtime_error(where + ": expected an array of 3 numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

Eigen::VectorXd read_vector(const json& j, int expected, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected)
    throw std::runtime_error(where + ": expected an array of " +
                             std::to_string(expected) + " numbers");
  Eigen::VectorXd v(expected);
  for (int k = 0; k < expected; ++k) {
    if (!j[k].is_number())
      throw std::runtime_error(where + ": expected an array of " +
                               std::to_string(expected) + " numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw std::runtime_error(where + ": missing field '" + key + "'");
  return *it;
}

Eigen::Matrix3d inertia_from_6(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 6)
    throw std::runtime_error(where + ": expected [ixx, iyy, izz, ixy, ixz, iyz]");
  double v[6];
  for (int k = 0; k < 6; ++k) {
    if (!j[k].is_number())
      throw std::runtime_error(where + ": expected 6 numbers");
    v[k] = j[k].get<double>();
  }
  Eigen::Matrix3d inertia;
  inertia << v[0], v[3], v[4],
             v[3], v[1], v[5],
             v[4], v[5], v[2];
  return inertia;
}

LinkEnvelope read_envelope(const json& j, const std::string& where) {
  LinkEnvelope env;
  const json& kind = require(j, "kind", where);
  if (!kind.is_string())
    throw std::runtime_error(where + ": 'kind' must be \"segment\" or \"vertices\"");
  const std::string name = kind.get<std::string>();
  if (name == "segment") {
    env.kind = LinkEnvelope::Kind::Segment;
  } else if (name == "vertices") {
    env.kind = LinkEnvelope::Kind::VertexSet;
  } else {
    throw std::runtime_error(where + ": 'kind' must be \"segment\" or \"vertices\"");
  }

  const json& anchors = require(j, "anchors", where);
  if (!anchors.is_array() || anchors.empty())
    throw std::runtime_error(where + ": 'anchors' must be a nonempty array");
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const std::string at = where + ".anchors[" + std::to_string(a) + "]";
    const json& entry = anchors[a];
    if (!entry.is_object()) throw std::runtime_error(at + ": expected an object");
    LinkEnvelope::Anchor anchor;
    const json& frame = require(entry, "frame", at);
    if (!frame.is_number_integer())
      throw std::runtime_error(at + ": 'frame' must be an integer");
    anchor.frame = frame.get<int>();
    if (const auto it = entry.find("local_point"); it != entry.end())
      anchor.local_point = read_vec3(*it, at + ".local_point");
    env.anchors.push_back(anchor);
  }
  return env;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const std::string& origin_hint) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin_hint + ": " + e.what());
  }
  if (!root.is_object())
    throw std::runtime_error(origin_hint + ": top level must be an object");

  const json& robot_field = require(root, "robot", origin_hint);
  if (!robot_field.is_string())
    throw std::runtime_error(origin_hint + ": 'robot' must be a path string");
  std::filesystem::path robot_path(robot_field.get<std::string>());
  if (robot_path.is_relative() && !base_dir.empty())
    robot_path = std::filesystem::path(base_dir) / robot_path;

  Scenario scenario;
  scenario.model = load_robot(robot_path.string());
  const int n = scenario.model.dof();

  if (const auto it = root.find("payload"); it != root.end()) {
    const std::string where = origin_hint + ".payload";
    if (!it->is_object()) throw std::runtime_error(where + ": expected an object");
    const json& mass = require(*it, "mass", where);
    if (!mass.is_number() || mass.get<double>() < 0.0)
      throw std::runtime_error(where + ": 'mass' must be a nonnegative number");
    Eigen::Vector3d com = Eigen::Vector3d::Zero();
    Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
    if (const auto c = it->find("com"); c != it->end())
      com = read_vec3(*c, where + ".com");
    if (const auto i = it->find("inertia"); i != it->end())
      inertia = inertia_from_6(*i, where + ".inertia");
    scenario.model = augment_payload(scenario.model, mass.get<double>(), com, inertia);
    validate_robot(scenario.model);
  }

  scenario.state.q = read_vector(require(root, "q", origin_hint), n,
                                 origin_hint + ".q");
  scenario.state.qd = Eigen::VectorXd::Zero(n);
  if (const auto it = root.find("qd"); it != root.end())
    scenario.state.qd = read_vector(*it, n, origin_hint + ".qd");
  check_state(scenario.model, scenario.state);

  const json& t_h = require(root, "t_h", origin_hint);
  if (!t_h.is_number())
    throw std::runtime_error(origin_hint + ": 't_h' must be a number");
  scenario.t_h = t_h.get<double>();
  if (!(scenario.t_h > 0.0) || !std::isfinite(scenario.t_h))
    throw std::runtime_error(origin_hint + ": 't_h' must be positive and finite");

  scenario.frame = n - 1;
  if (const auto it = root.find("frame"); it != root.end()) {
    if (!it->is_number_integer())
      throw std::runtime_error(origin_hint + ": 'frame' must be an integer");
    scenario.frame = it->get<int>();
  }
  if (scenario.frame < 0 || scenario.frame >= n)
    throw std::runtime_error(origin_hint + ": 'frame' must be in [0, " +
                             std::to_string(n - 1) + "]");

  if (const auto it = root.find("local_point"); it != root.end())
    scenario.local_point = read_vec3(*it, origin_hint + ".local_point");

  if (const auto it = root.find("task_dim"); it != root.end()) {
    if (!it->is_number_integer())
      throw std::runtime_error(origin_hint + ": 'task_dim' must be an integer");
    scenario.task_dim = it->get<int>();
  }
  if (scenario.task_dim != 2 && scenario.task_dim != 3)
    throw std::runtime_error(origin_hint + ": 'task_dim' must be 2 or 3");

  if (const auto it = root.find("environment"); it != root.end()) {
    const std::string where = origin_hint + ".environment";
    if (!it->is_object()) throw std::runtime_error(where + ": expected an object");
    const json& rows = require(*it, "A", where);
    const json& offsets = require(*it, "b", where);
    if (!rows.is_array() || !offsets.is_array() || rows.size() != offsets.size())
      throw std::runtime_error(where + ": 'A' and 'b' must be arrays of equal length");
    const int count = static_cast<int>(rows.size());
    scenario.environment.A_e.resize(count, scenario.task_dim);
    scenario.environment.b_e.resize(count);
    for (int r = 0; r < count; ++r) {
      scenario.environment.A_e.row(r) = read_vector(
          rows[r], scenario.task_dim, where + ".A[" + std::to_string(r) + "]");
      if (!offsets[r].is_number())
        throw std::runtime_error(where + ".b[" + std::to_string(r) +
                                 "]: expected a number");
      scenario.environment.b_e[r] = offsets[r].get<double>();
    }
    scenario.has_environment = count > 0;
  }

  if (const auto it = root.find("links"); it != root.end()) {
    const std::string where = origin_hint + ".links";
    if (!it->is_array()) throw std::runtime_error(where + ": expected an array");
    for (std::size_t k = 0; k < it->size(); ++k)
      scenario.links.push_back(
          read_envelope((*it)[k], where + "[" + std::to_string(k) + "]"));
    for (const LinkEnvelope& link : scenario.links)
      for (const LinkEnvelope::Anchor& anchor : link.anchors)
        if (anchor.frame < 0 || anchor.frame >= n)
          throw std::runtime_error(where + ": anchor frame " +
                                   std::to_string(anchor.frame) +
                                   " is out of range [0, " +
                                   std::to_string(n - 1) + "]");
  }

  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream stream(path);
  if (!stream)
    throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream text;
  text << stream.rdbuf();
  return parse_scenario(text.str(),
                        std::filesystem::path(path).parent_path().string(), path);
}

}  // namespace reachspan
