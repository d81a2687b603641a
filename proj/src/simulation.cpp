#include "reachspan/simulation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "reachspan/dynamics.hpp"

namespace reachspan {

namespace {

Eigen::VectorXd snap_to_torque_box(const RobotModel& model, const Eigen::VectorXd& tau) {
  const Eigen::VectorXd lo = model.tau_min();
  const Eigen::VectorXd hi = model.tau_max();
  if (tau.size() != lo.size())
    throw std::invalid_argument("simulate: torque has " + std::to_string(tau.size()) +
                                " entries for a " + std::to_string(lo.size()) +
                                "-joint model");
  for (int i = 0; i < tau.size(); ++i) {
    const double slack = 1e-7 * std::max(1.0, std::max(std::abs(lo[i]), std::abs(hi[i])));
    if (tau[i] < lo[i] - slack || tau[i] > hi[i] + slack)
      throw std::invalid_argument("simulate: torque " + std::to_string(tau[i]) +
                                  " at joint " + std::to_string(i) +
                                  " is outside the limits [" + std::to_string(lo[i]) +
                                  ", " + std::to_string(hi[i]) + "]");
  }
  return tau.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

Trajectory simulate(const RobotModel& model, const RobotState& state,
                    const Eigen::VectorXd& tau, double t_h, double dt, int frame,
                    const Eigen::Vector3d& local_point, int task_dim) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("simulate: dt must be positive, got " + std::to_string(dt));
  if (t_h < dt)
    throw std::invalid_argument("simulate: horizon " + std::to_string(t_h) +
                                " is shorter than one step of " + std::to_string(dt));
  if (task_dim != 2 && task_dim != 3)
    throw std::invalid_argument("simulate: task_dim must be 2 or 3, got " +
                                std::to_string(task_dim));
  check_state(model, state);
  const Eigen::VectorXd tau_box = snap_to_torque_box(model, tau);

  const int steps = static_cast<int>(std::lround(t_h / dt));
  const Eigen::VectorXd q_lo = model.q_min();
  const Eigen::VectorXd q_hi = model.q_max();
  const Eigen::VectorXd qd_lo = model.qd_min();
  const Eigen::VectorXd qd_hi = model.qd_max();

  Trajectory traj;
  traj.samples.reserve(steps + 1);

  Eigen::VectorXd q = state.q;
  Eigen::VectorXd qd = state.qd;
  const auto record = [&](double t) {
    traj.samples.push_back(
        {t, q, qd, forward_kinematics(model, q, frame, local_point).head(task_dim)});
  };
  record(0.0);

  for (int k = 1; k <= steps; ++k) {
    const Eigen::VectorXd qdd = forward_dynamics(model, q, qd, tau_box);
    q += qd * dt + qdd * (0.5 * dt * dt);
    qd = (qd + qdd * dt).cwiseMax(qd_lo).cwiseMin(qd_hi);
    for (int i = 0; i < q.size(); ++i) {
      if (q[i] >= q_hi[i]) {
        q[i] = q_hi[i];
        qd[i] = 0.0;
      } else if (q[i] <= q_lo[i]) {
        q[i] = q_lo[i];
        qd[i] = 0.0;
      }
    }
    record(k * dt);
  }
  return traj;
}

ReachedSet collect_reached(const RobotModel& model, const RobotState& state,
                           const Polytope& poly, double t_h, double dt, int frame,
                           const Eigen::Vector3d& local_point) {
  if (poly.generators.empty() || poly.generators.size() != poly.vertices.size())
    throw std::runtime_error(
        "collect_reached: polytope does not carry a torque witness per vertex");

  const int n_v = static_cast<int>(poly.vertices.size());
  const int steps = static_cast<int>(std::lround(t_h / dt));

  ReachedSet out;
  out.steps = steps;
  out.n_vertices = n_v;
  out.points.resize(poly.dim, static_cast<Eigen::Index>(steps) * n_v);
  out.vertex_of.resize(static_cast<std::size_t>(steps) * n_v);

  Eigen::Index col = 0;
  for (int k = 0; k < n_v; ++k) {
    const Trajectory traj =
        simulate(model, state, poly.generators[k], t_h, dt, frame, local_point, poly.dim);
    for (int s = 1; s <= steps; ++s, ++col) {
      out.points.col(col) = traj.samples[s].x;
      out.vertex_of[col] = k;
    }
  }
  return out;
}

}  // namespace reachspan
