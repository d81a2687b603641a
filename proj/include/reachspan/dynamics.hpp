#ifndef REACHSPAN_DYNAMICS_HPP
#define REACHSPAN_DYNAMICS_HPP

#include <Eigen/Dense>

#include "reachspan/robot_model.hpp"

namespace reachspan {

/**
 * @brief World-frame pose of every joint frame plus derived per-link data.
 *
 * Filled by kinematics_pass() and consumed by the dynamics routines; callers
 * that need several quantities at the same configuration can reuse one pass.
 */
struct KinematicsPass {
  std::vector<Eigen::Matrix3d> R;     // world rotation of joint frame i
  std::vector<Eigen::Vector3d> o;     // world position of joint origin i
  std::vector<Eigen::Vector3d> z;     // world joint axis i
  std::vector<Eigen::Vector3d> com;   // world link COM i
  std::vector<Eigen::Matrix3d> I;     // world link inertia about COM i
};

KinematicsPass kinematics_pass(const RobotModel& model, const Eigen::VectorXd& q);

/** @brief World position of `local_point` (expressed in joint frame `frame`). */
Eigen::Vector3d forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q,
                                   int frame, const Eigen::Vector3d& local_point);

/**
 * @brief Positional Jacobian (3 x n) of the given task point.
 *
 * Column i is z_i x (p - o_i) for joints on the chain up to `frame`; columns
 * of joints beyond `frame` are zero.
 */
Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                         int frame, const Eigen::Vector3d& local_point);

/**
 * @brief Velocity-product Cartesian acceleration dJ/dt * qd of the task point,
 *        i.e. the linear acceleration it would have with qdd = 0 and no gravity.
 */
Eigen::Vector3d jdot_qdot(const RobotModel& model, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& qd, int frame,
                          const Eigen::Vector3d& local_point);

/**
 * @brief Joint-space inertia matrix M(q), computed by composite-rigid-body
 *        accumulation from the chain tip.  Symmetric positive definite for a
 *        chain with positive link masses.
 */
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q);

/**
 * @brief Bias torque tau_d(q, qd): Coriolis/centrifugal plus gravity load, via
 *        a recursive Newton-Euler sweep with qdd = 0.
 */
Eigen::VectorXd bias_torque(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qd);

/**
 * @brief Joint accelerations qdd = M(q)^{-1} (tau - tau_d(q, qd)).
 * @throws std::runtime_error if the mass matrix is not positive definite.
 */
Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qd, const Eigen::VectorXd& tau);

}  // namespace reachspan

#endif  // REACHSPAN_DYNAMICS_HPP
