#include "reachspan/robot_model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reachspan {

using nlohmann::json;

namespace {

Eigen::VectorXd gather(const std::vector<JointSpec>& joints, double JointSpec::*field) {
  Eigen::VectorXd out(static_cast<int>(joints.size()));
  for (size_t i = 0; i < joints.size(); ++i) out[static_cast<int>(i)] = joints[i].*field;
  return out;
}

Eigen::Vector3d read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error(where + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw std::runtime_error(where + ": expected an array of 3 numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

std::pair<double, double> read_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error(where + ": expected [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error(where + ": missing field '" + key + "'");
  return *it;
}

Eigen::Matrix3d inertia_from_6(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 6)
    throw std::runtime_error(where + ": expected [ixx, iyy, izz, ixy, ixz, iyz]");
  double v[6];
  for (int k = 0; k < 6; ++k) {
    if (!j[k].is_number()) throw std::runtime_error(where + ": expected 6 numbers");
    v[k] = j[k].get<double>();
  }
  Eigen::Matrix3d I;
  I << v[0], v[3], v[4],
       v[3], v[1], v[5],
       v[4], v[5], v[2];
  return I;
}

}  // namespace

Eigen::VectorXd RobotModel::tau_min() const { return gather(joints, &JointSpec::tau_min); }
Eigen::VectorXd RobotModel::tau_max() const { return gather(joints, &JointSpec::tau_max); }
Eigen::VectorXd RobotModel::qd_min() const { return gather(joints, &JointSpec::qd_min); }
Eigen::VectorXd RobotModel::qd_max() const { return gather(joints, &JointSpec::qd_max); }
Eigen::VectorXd RobotModel::q_min() const { return gather(joints, &JointSpec::q_min); }
Eigen::VectorXd RobotModel::q_max() const { return gather(joints, &JointSpec::q_max); }

void validate_robot(const RobotModel& model) {
  if (model.joints.empty()) throw std::runtime_error("robot '" + model.name + "': no joints");
  if (!model.gravity.allFinite()) throw std::runtime_error("robot '" + model.name + "': gravity not finite");
  for (size_t i = 0; i < model.joints.size(); ++i) {
    const JointSpec& jt = model.joints[i];
    const std::string where = "joint " + std::to_string(i);
    if (std::abs(jt.axis.norm() - 1.0) > 1e-9)
      throw std::runtime_error(where + ": axis must be unit length");
    if (jt.link_mass < 0.0) throw std::runtime_error(where + ": negative mass");
    if (!(jt.tau_min < jt.tau_max)) throw std::runtime_error(where + ": tau_min >= tau_max");
    if (!(jt.qd_min < jt.qd_max)) throw std::runtime_error(where + ": qd_min >= qd_max");
    if (!(jt.q_min < jt.q_max)) throw std::runtime_error(where + ": q_min >= q_max");
    if ((jt.link_inertia - jt.link_inertia.transpose()).norm() > 1e-9)
      throw std::runtime_error(where + ": inertia not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jt.link_inertia);
    const double scale = std::max(1.0, jt.link_inertia.norm());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
      throw std::runtime_error(where + ": inertia not positive semidefinite");
    if (!jt.origin_xyz.allFinite() || !jt.origin_rpy.allFinite() || !jt.link_com.allFinite())
      throw std::runtime_error(where + ": non-finite geometry");
  }
}

RobotModel parse_robot(const std::string& json_text, const std::string& origin_hint) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin_hint + ": JSON parse error at byte " +
                             std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw std::runtime_error(origin_hint + ": top level must be an object");

  RobotModel model;
  model.name = root.value("name", std::string("unnamed"));
  model.gravity = read_vec3(require(root, "gravity", origin_hint), origin_hint + ".gravity");

  const json& joints = require(root, "joints", origin_hint);
  if (!joints.is_array() || joints.empty())
    throw std::runtime_error(origin_hint + ".joints: expected a non-empty array");

  for (size_t i = 0; i < joints.size(); ++i) {
    const json& j = joints[i];
    const std::string where = origin_hint + ".joints[" + std::to_string(i) + "]";
    if (!j.is_object()) throw std::runtime_error(where + ": expected an object");
    JointSpec spec;
    const json& origin = require(j, "origin", where);
    spec.origin_xyz = read_vec3(require(origin, "xyz", where + ".origin"), where + ".origin.xyz");
    spec.origin_rpy = read_vec3(require(origin, "rpy", where + ".origin"), where + ".origin.rpy");
    spec.axis = read_vec3(require(j, "axis", where), where + ".axis");
    const json& mass = require(j, "mass", where);
    if (!mass.is_number()) throw std::runtime_error(where + ".mass: expected a number");
    spec.link_mass = mass.get<double>();
    spec.link_com = read_vec3(require(j, "com", where), where + ".com");
    spec.link_inertia = inertia_from_6(require(j, "inertia", where), where + ".inertia");
    std::tie(spec.tau_min, spec.tau_max) = read_range(require(j, "tau", where), where + ".tau");
    std::tie(spec.qd_min, spec.qd_max) = read_range(require(j, "qd", where), where + ".qd");
    std::tie(spec.q_min, spec.q_max) = read_range(require(j, "q", where), where + ".q");
    model.joints.push_back(spec);
  }

  validate_robot(model);
  return model;
}

RobotModel load_robot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open robot file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_robot(ss.str(), path);
}

RobotModel augment_payload(const RobotModel& model, double mass,
                           const Eigen::Vector3d& com_offset,
                           const Eigen::Matrix3d& inertia) {
  if (mass < 0.0) throw std::runtime_error("payload mass must be non-negative");
  RobotModel out = model;
  JointSpec& last = out.joints.back();

  const double m1 = last.link_mass;
  const double m2 = mass;
  const double total = m1 + m2;
  if (total <= 0.0) return out;  // two massless bodies, nothing to combine

  const Eigen::Vector3d c1 = last.link_com;
  const Eigen::Vector3d c2 = com_offset;
  const Eigen::Vector3d c = (m1 * c1 + m2 * c2) / total;

  auto shift = [](double m, const Eigen::Vector3d& d) -> Eigen::Matrix3d {
    return m * (d.squaredNorm() * Eigen::Matrix3d::Identity() - d * d.transpose());
  };
  last.link_inertia = last.link_inertia + shift(m1, c1 - c) + inertia + shift(m2, c2 - c);
  last.link_com = c;
  last.link_mass = total;
  return out;
}

void check_state(const RobotModel& model, const RobotState& state, double tol) {
  const int n = model.dof();
  if (state.q.size() != n || state.qd.size() != n)
    throw std::runtime_error("state dimension mismatch: expected " + std::to_string(n) +
                             " joints, got q=" + std::to_string(state.q.size()) +
                             " qd=" + std::to_string(state.qd.size()));
  for (int i = 0; i < n; ++i) {
    const JointSpec& jt = model.joints[i];
    if (state.q[i] < jt.q_min - tol || state.q[i] > jt.q_max + tol)
      throw std::runtime_error("joint " + std::to_string(i) + ": q outside position limits");
    if (state.qd[i] < jt.qd_min - tol || state.qd[i] > jt.qd_max + tol)
      throw std::runtime_error("joint " + std::to_string(i) + ": qd outside velocity limits");
  }
}

}  // namespace reachspan
