#ifndef REACHSPAN_ROBOT_MODEL_HPP
#define REACHSPAN_ROBOT_MODEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace reachspan {

/**
 * @brief One revolute joint of a serial chain together with the rigid link
 *        attached to its rotated frame.
 *
 * The joint frame is obtained from the parent frame by the fixed transform
 * (origin_xyz, origin_rpy) followed by a rotation of q about `axis`.  The
 * link inertial data (mass, COM, rotational inertia about the COM) are
 * expressed in the rotated joint frame.
 */
struct JointSpec {
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d origin_rpy = Eigen::Vector3d::Zero();  // roll-pitch-yaw, applied as Rz(y)*Ry(p)*Rx(r)
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();       // unit vector, joint frame

  double link_mass = 0.0;
  Eigen::Vector3d link_com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d link_inertia = Eigen::Matrix3d::Zero();  // about link COM

  double tau_min = 0.0, tau_max = 0.0;
  double qd_min = 0.0, qd_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
};

/** @brief Fixed-base serial chain of revolute joints. */
struct RobotModel {
  std::string name;
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);
  std::vector<JointSpec> joints;

  int dof() const { return static_cast<int>(joints.size()); }

  Eigen::VectorXd tau_min() const;
  Eigen::VectorXd tau_max() const;
  Eigen::VectorXd qd_min() const;
  Eigen::VectorXd qd_max() const;
  Eigen::VectorXd q_min() const;
  Eigen::VectorXd q_max() const;
};

/** @brief Joint-space state (positions and velocities). */
struct RobotState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
};

/**
 * @brief Loads a robot description from a JSON file.
 *
 * Expected layout:
 * @code
 * { "name": "...", "gravity": [gx, gy, gz],
 *   "joints": [ { "origin": {"xyz": [..], "rpy": [..]}, "axis": [..],
 *                 "mass": m, "com": [..],
 *                 "inertia": [ixx, iyy, izz, ixy, ixz, iyz],
 *                 "tau": [min, max], "qd": [min, max], "q": [min, max] }, .. ] }
 * @endcode
 *
 * @throws std::runtime_error on malformed JSON (with position info) or on a
 *         description that violates the model invariants (message names the
 *         offending joint index).
 */
RobotModel load_robot(const std::string& path);

/** @brief Parses a robot description from an in-memory JSON string. */
RobotModel parse_robot(const std::string& json_text, const std::string& origin_hint = "<string>");

/** @brief Validates model invariants; throws std::runtime_error naming the offending joint. */
void validate_robot(const RobotModel& model);

/**
 * @brief Rigidly attaches a payload to the terminal link.
 *
 * The payload is described by its mass, COM offset and rotational inertia
 * about its own COM, all expressed in the terminal joint frame.  Masses add,
 * the combined COM is the mass-weighted mean and the inertias are combined
 * about the new COM via the parallel-axis theorem.  The input model is left
 * untouched.
 */
RobotModel augment_payload(const RobotModel& model, double mass,
                           const Eigen::Vector3d& com_offset,
                           const Eigen::Matrix3d& inertia);

/** @brief Checks that q and qd have matching sizes and lie inside the model's boxes. */
void check_state(const RobotModel& model, const RobotState& state, double tol = 1e-9);

}  // namespace reachspan

#endif  // REACHSPAN_ROBOT_MODEL_HPP
