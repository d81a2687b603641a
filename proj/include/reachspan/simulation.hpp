#pragma once

#include <Eigen/Dense>
#include <vector>

#include "reachspan/polytope.hpp"
#include "reachspan/robot_model.hpp"

namespace reachspan {

struct TrajectorySample {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd x;
};

/// Rollout of the full nonlinear dynamics under a constant torque. The first
/// sample is the initial state at t = 0; one sample follows per integration
/// step.
struct Trajectory {
  std::vector<TrajectorySample> samples;
};

/// Task-space points visited by one rollout per polytope vertex, as columns
/// of `points`. `vertex_of[j]` names the vertex whose witness torque
/// produced column j. With all rollouts complete the matrix holds
/// steps * n_vertices columns.
struct ReachedSet {
  Eigen::MatrixXd points;
  std::vector<int> vertex_of;
  int steps = 0;
  int n_vertices = 0;
};

/// Integrates the joint dynamics under constant torque `tau` for
/// round(t_h/dt) steps of length dt. Each step updates the position with the
/// current velocity and acceleration (q += qd dt + qdd dt^2/2), then the
/// velocity, clamps the velocity to its box, and pins any joint that reached
/// a position bound there with zero velocity. `x` samples track the point
/// `local_point` in `frame`, truncated to `task_dim` coordinates.
///
/// `tau` must lie inside the torque box up to a small solver tolerance;
/// within that tolerance it is snapped onto the box. Throws
/// std::invalid_argument for non-positive dt, t_h < dt, or a torque outside
/// the limits, and std::runtime_error for an invalid state.
Trajectory simulate(const RobotModel& model, const RobotState& state,
                    const Eigen::VectorXd& tau, double t_h, double dt, int frame,
                    const Eigen::Vector3d& local_point, int task_dim = 3);

/// Runs one rollout per polytope vertex using the vertex's witness torque
/// and pools every post-initial sample. The polytope must carry generators.
ReachedSet collect_reached(const RobotModel& model, const RobotState& state,
                           const Polytope& poly, double t_h, double dt, int frame,
                           const Eigen::Vector3d& local_point);

}  // namespace reachspan
