#include "reachspan/horizon.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "reachspan/dynamics.hpp"
#include "reachspan/linprog.hpp"

namespace reachspan {

ProjectionProblem build_projection(const RobotModel& model, const RobotState& state,
                                   const HorizonSpec& horizon, int frame,
                                   const Eigen::Vector3d& local_point,
                                   int task_dim) {
  if (!(horizon.t_h > 0.0) || !std::isfinite(horizon.t_h)) {
    throw std::invalid_argument("build_projection: horizon t_h must be positive and finite, got " +
                                std::to_string(horizon.t_h));
  }
  if (task_dim != 2 && task_dim != 3) {
    throw std::invalid_argument("build_projection: task_dim must be 2 or 3, got " +
                                std::to_string(task_dim));
  }
  check_state(model, state);

  const int n = model.dof();
  const double t_h = horizon.t_h;
  const double half_t2 = 0.5 * t_h * t_h;

  const Eigen::Vector3d x_k3 = forward_kinematics(model, state.q, frame, local_point);
  const Eigen::MatrixXd J3 = jacobian(model, state.q, frame, local_point);
  const Eigen::Vector3d jj3 = jdot_qdot(model, state.q, state.qd, frame, local_point);

  const Eigen::MatrixXd M = mass_matrix(model, state.q);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("build_projection: mass matrix is not positive definite");
  }
  const Eigen::MatrixXd M_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  ProjectionProblem out;
  out.tau_d = bias_torque(model, state.q, state.qd);

  const Eigen::MatrixXd J = J3.topRows(task_dim);
  out.P = (J * M_inv) * half_t2;
  out.x_star = x_k3.head(task_dim) + (J * state.qd) * t_h + jj3.head(task_dim) * half_t2 -
               out.P * out.tau_d;

  const Eigen::MatrixXd vel_map = M_inv * t_h;
  const Eigen::MatrixXd pos_map = M_inv * half_t2;
  const Eigen::VectorXd vel_shift = vel_map * out.tau_d;
  const Eigen::VectorXd pos_shift = pos_map * out.tau_d;
  const Eigen::VectorXd q_drift = state.q + state.qd * t_h;

  out.n_torque_rows = 6 * n;
  out.A.resize(6 * n, n);
  out.b.resize(6 * n);

  out.A.block(0, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  out.b.segment(0, n) = model.tau_max();

  out.A.block(n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  out.b.segment(n, n) = -model.tau_min();

  out.A.block(2 * n, 0, n, n) = vel_map;
  out.b.segment(2 * n, n) = model.qd_max() - state.qd + vel_shift;

  out.A.block(3 * n, 0, n, n) = -vel_map;
  out.b.segment(3 * n, n) = state.qd - model.qd_min() - vel_shift;

  out.A.block(4 * n, 0, n, n) = pos_map;
  out.b.segment(4 * n, n) = model.q_max() - q_drift + pos_shift;

  out.A.block(5 * n, 0, n, n) = -pos_map;
  out.b.segment(5 * n, n) = q_drift - model.q_min() - pos_shift;

  return out;
}

ProjectionProblem add_environment(const ProjectionProblem& problem,
                                  const EnvironmentConstraints& env) {
  const int m = static_cast<int>(problem.P.rows());
  const int rows = static_cast<int>(env.A_e.rows());
  if (env.A_e.cols() != m) {
    throw std::invalid_argument("add_environment: constraint normals have " +
                                std::to_string(env.A_e.cols()) + " columns, expected " +
                                std::to_string(m));
  }
  if (env.b_e.size() != rows) {
    throw std::invalid_argument("add_environment: got " + std::to_string(env.b_e.size()) +
                                " offsets for " + std::to_string(rows) + " constraint rows");
  }
  if (!env.A_e.allFinite() || !env.b_e.allFinite()) {
    throw std::invalid_argument("add_environment: constraints contain non-finite entries");
  }

  ProjectionProblem out = problem;
  if (rows == 0) return out;

  // Each half-space is rescaled to a unit Cartesian normal before the map
  // into torque space, so the appended rows share a common length scale no
  // matter how the caller wrote them.
  const int k = static_cast<int>(problem.A.rows());
  out.A.conservativeResize(k + rows, Eigen::NoChange);
  out.b.conservativeResize(k + rows);
  for (int i = 0; i < rows; ++i) {
    const double nrm = env.A_e.row(i).norm();
    const double scale = nrm > 0.0 ? 1.0 / nrm : 1.0;
    out.A.row(k + i) = scale * env.A_e.row(i) * problem.P;
    out.b[k + i] = scale * (env.b_e[i] - env.A_e.row(i).dot(problem.x_star));
  }
  return out;
}

FeasibilityResult check_feasibility(const ProjectionProblem& problem) {
  FeasibilityResult res;
  if (problem.tau_d.size() == problem.A.cols() &&
      ((problem.A * problem.tau_d - problem.b).array() <= 0.0).all()) {
    res.feasible = true;
    res.witness = problem.tau_d;
    return res;
  }

  const Eigen::VectorXd c = Eigen::VectorXd::Zero(problem.A.cols());
  const LpResult lp = solve_lp(c, problem.A, problem.b);
  if (lp.status == LpStatus::Optimal) {
    res.feasible = true;
    res.witness = lp.x;
  }
  return res;
}

}  // namespace reachspan
