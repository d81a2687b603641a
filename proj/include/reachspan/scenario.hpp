#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "reachspan/horizon.hpp"
#include "reachspan/ichm.hpp"
#include "reachspan/robot_model.hpp"

namespace reachspan {

/// One fully resolved problem setup: the robot (payload already attached),
/// its state, the horizon, the task frame and point, optional environment
/// half-spaces in task space and optional link envelopes.
struct Scenario {
  RobotModel model;
  RobotState state;
  double t_h = 0.0;
  int frame = 0;
  Eigen::Vector3d local_point = Eigen::Vector3d::Zero();
  int task_dim = 3;
  bool has_environment = false;
  EnvironmentConstraints environment;
  std::vector<LinkEnvelope> links;
};

/// Parse a scenario from JSON text:
///
/// @code
/// { "robot": "arm.json", "q": [..], "qd": [..], "t_h": 0.15,
///   "frame": 6, "local_point": [0, 0, 0.1], "task_dim": 3,
///   "payload": {"mass": 2.0, "com": [..], "inertia": [6 entries]},
///   "environment": {"A": [[..], ..], "b": [..]},
///   "links": [{"kind": "segment", "anchors": [{"frame": 4,
///              "local_point": [..]}, ..]}, ..] }
/// @endcode
///
/// `qd`, `frame` (default: last joint), `local_point`, `task_dim` and the
/// optional blocks may be omitted. The robot path resolves against
/// `base_dir` unless absolute. Throws std::runtime_error naming the problem
/// on malformed input, inconsistent sizes or a state outside the limits.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const std::string& origin_hint = "<string>");

/// Read and parse a scenario file; the robot path inside resolves relative
/// to the scenario file's directory.
Scenario load_scenario(const std::string& path);

}  // namespace reachspan
