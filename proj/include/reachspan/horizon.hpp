#pragma once

#include <Eigen/Dense>

#include "reachspan/robot_model.hpp"

namespace reachspan {

/// Prediction horizon length.
struct HorizonSpec {
  double t_h = 0.0;
};

/// Linearized constant-torque horizon prediction in torque space.
///
/// The end-effector position predicted for a torque tau held over the
/// horizon is x = P tau + x_star. Feasible torques satisfy A tau <= b,
/// where the first n_torque_rows rows encode the joint torque, velocity and
/// position boxes mapped into torque space; any rows after those come from
/// Cartesian environment half-spaces. tau_d is the bias torque at the
/// linearization state (the torque that produces zero joint acceleration).
struct ProjectionProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd x_star;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int n_torque_rows = 0;
  Eigen::VectorXd tau_d;
};

/// Cartesian half-spaces A_e x <= b_e restricting where the end effector may
/// be at the end of the horizon.
struct EnvironmentConstraints {
  Eigen::MatrixXd A_e;
  Eigen::VectorXd b_e;
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd witness;
};

/// Assembles the horizon projection for the task point given by `frame` and
/// `local_point`. `task_dim` selects the leading rows of the position
/// Jacobian: 3 for spatial robots, 2 for planar ones.
///
/// Throws std::invalid_argument for a non-positive horizon or bad task_dim,
/// and std::runtime_error when the state violates the model limits or the
/// mass matrix is not positive definite.
ProjectionProblem build_projection(const RobotModel& model, const RobotState& state,
                                   const HorizonSpec& horizon, int frame,
                                   const Eigen::Vector3d& local_point,
                                   int task_dim = 3);

/// Returns a copy of `problem` with the environment rows appended (mapped
/// through P into torque space). The input problem is not modified.
ProjectionProblem add_environment(const ProjectionProblem& problem,
                                  const EnvironmentConstraints& env);

/// Decides whether any torque satisfies all constraint rows. Tries the bias
/// torque first, then solves a feasibility LP. Infeasibility is a result,
/// not an error.
FeasibilityResult check_feasibility(const ProjectionProblem& problem);

}  // namespace reachspan
