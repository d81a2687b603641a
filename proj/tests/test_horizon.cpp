#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "reachspan/dynamics.hpp"
#include "reachspan/horizon.hpp"
#include "reachspan/linprog.hpp"
#include "reachspan/robot_model.hpp"

using namespace reachspan;

namespace {

const Eigen::Vector3d kTip(1, 0, 0);

RobotModel planar2() { return load_robot(oracles::data_path("planar2.json")); }
RobotModel generic7() { return load_robot(oracles::data_path("generic7.json")); }

RobotState interior_state(const RobotModel& m, std::mt19937_64& rng, double q_span = 0.8,
                          double qd_span = 0.5) {
  const Eigen::VectorXd q_mid = 0.5 * (m.q_min() + m.q_max());
  const Eigen::VectorXd q_half = 0.5 * (m.q_max() - m.q_min()) * q_span;
  const Eigen::VectorXd qd_mid = 0.5 * (m.qd_min() + m.qd_max());
  const Eigen::VectorXd qd_half = 0.5 * (m.qd_max() - m.qd_min()) * qd_span;
  RobotState s;
  s.q = oracles::uniform_vec(rng, q_mid - q_half, q_mid + q_half);
  s.qd = oracles::uniform_vec(rng, qd_mid - qd_half, qd_mid + qd_half);
  return s;
}

Eigen::Vector3d coasting_point(const RobotModel& m, const RobotState& s, int frame,
                               const Eigen::Vector3d& tip, double t_h) {
  return forward_kinematics(m, s.q, frame, tip) + jacobian(m, s.q, frame, tip) * s.qd * t_h +
         jdot_qdot(m, s.q, s.qd, frame, tip) * (0.5 * t_h * t_h);
}

}  // namespace

TEST_SUITE_BEGIN("horizon");

TEST_CASE("vanishing horizon keeps every feasible endpoint at the current position") {
  const RobotModel m = planar2();
  std::mt19937_64 rng(11);
  const int frame = m.dof() - 1;
  const double t_h = 1e-6;
  const Eigen::VectorXd tau_big = m.tau_max().cwiseAbs().cwiseMax(m.tau_min().cwiseAbs());
  for (int trial = 0; trial < 10; ++trial) {
    RobotState s = interior_state(m, rng);
    s.qd.setZero();
    const Eigen::Vector3d x_k = forward_kinematics(m, s.q, frame, kTip);
    for (int td : {2, 3}) {
      const ProjectionProblem pr = build_projection(m, s, {t_h}, frame, kTip, td);
      for (int r = 0; r < td; ++r) {
        const double spread = pr.P.row(r).cwiseAbs().dot(tau_big);
        CHECK(spread + std::abs(pr.x_star[r] - x_k[r]) < 1e-9);
      }
    }
  }

  for (int trial = 0; trial < 10; ++trial) {
    const RobotState s = interior_state(m, rng);
    const Eigen::Vector3d x_k = forward_kinematics(m, s.q, frame, kTip);
    const double drift = (jacobian(m, s.q, frame, kTip) * s.qd).norm() * t_h;
    const ProjectionProblem pr = build_projection(m, s, {t_h}, frame, kTip);
    double worst = (pr.x_star - x_k).norm();
    for (int r = 0; r < 3; ++r) worst += pr.P.row(r).cwiseAbs().dot(tau_big);
    CHECK(worst <= drift + 1e-9);
  }
}

TEST_CASE("at rest without gravity the offset point is the current position exactly") {
  RobotModel m = planar2();
  m.gravity.setZero();
  RobotState s;
  s.q = Eigen::Vector2d(0.4, -0.2);
  s.qd = Eigen::Vector2d::Zero();
  const ProjectionProblem pr = build_projection(m, s, {0.1}, 1, kTip, 2);
  const Eigen::Vector3d x_k = forward_kinematics(m, s.q, 1, kTip);
  CHECK(pr.tau_d.cwiseAbs().maxCoeff() == 0.0);
  CHECK(pr.x_star[0] == x_k[0]);
  CHECK(pr.x_star[1] == x_k[1]);
}

TEST_CASE("zero torque maps to the offset point and the bias torque to the coasting point") {
  const RobotModel m = generic7();
  std::mt19937_64 rng(12);
  const int frame = m.dof() - 1;
  const double t_h = 0.15;
  for (int trial = 0; trial < 8; ++trial) {
    const RobotState s = interior_state(m, rng);
    const ProjectionProblem pr = build_projection(m, s, {t_h}, frame, kTip);

    const Eigen::VectorXd at_zero = pr.P * Eigen::VectorXd::Zero(m.dof()) + pr.x_star;
    CHECK((at_zero - pr.x_star).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd at_bias = pr.P * pr.tau_d + pr.x_star;
    const Eigen::Vector3d coast = coasting_point(m, s, frame, kTip, t_h);
    CHECK((at_bias - coast).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("doubling the horizon scales the projection by exactly four") {
  const RobotModel m = generic7();
  std::mt19937_64 rng(13);
  const RobotState s{oracles::random_config(m, rng), Eigen::VectorXd::Zero(m.dof())};
  const ProjectionProblem a = build_projection(m, s, {0.1}, m.dof() - 1, kTip);
  const ProjectionProblem b = build_projection(m, s, {0.2}, m.dof() - 1, kTip);
  CHECK((b.P - 4.0 * a.P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constraint stack has the documented shape") {
  const RobotModel m = generic7();
  std::mt19937_64 rng(14);
  const RobotState s = interior_state(m, rng);
  const ProjectionProblem pr = build_projection(m, s, {0.1}, m.dof() - 1, kTip);
  const int n = m.dof();
  CHECK(pr.n_torque_rows == 6 * n);
  CHECK(pr.A.rows() == 6 * n);
  CHECK(pr.A.cols() == n);
  CHECK(pr.b.size() == 6 * n);
  CHECK(pr.P.rows() == 3);
  CHECK(pr.P.cols() == n);
  CHECK(pr.x_star.size() == 3);
  CHECK(pr.tau_d.size() == n);

  const ProjectionProblem flat = build_projection(planar2(), RobotState{Eigen::Vector2d(0.1, 0.2),
                                                                        Eigen::Vector2d::Zero()},
                                                  {0.1}, 1, kTip, 2);
  CHECK(flat.P.rows() == 2);
  CHECK(flat.x_star.size() == 2);
}

TEST_CASE("feasible torques keep the implied joint state inside its boxes") {
  std::mt19937_64 rng(15);
  for (const RobotModel& m : {planar2(), generic7()}) {
    const int n = m.dof();
    const double t_h = 0.1;
    for (int trial = 0; trial < 5; ++trial) {
      const RobotState s = interior_state(m, rng);
      const ProjectionProblem pr = build_projection(m, s, {t_h}, n - 1, kTip);

      const Eigen::MatrixXd M_inv =
          mass_matrix(m, s.q).fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
      for (int dir = 0; dir < 20; ++dir) {
        Eigen::VectorXd c(n);
        for (int i = 0; i < n; ++i) c[i] = oracles::uniform(rng, -1.0, 1.0);
        const LpResult lp = solve_lp(c, pr.A, pr.b);
        REQUIRE(lp.status == LpStatus::Optimal);
        const Eigen::VectorXd& tau = lp.x;

        CHECK(((pr.A * tau - pr.b).array() <= 1e-7).all());
        CHECK((tau - m.tau_max()).maxCoeff() <= 1e-7);
        CHECK((m.tau_min() - tau).maxCoeff() <= 1e-7);

        const Eigen::VectorXd qdd = M_inv * (tau - pr.tau_d);
        const Eigen::VectorXd qd_next = s.qd + qdd * t_h;
        const Eigen::VectorXd q_next = s.q + s.qd * t_h + qdd * (0.5 * t_h * t_h);
        CHECK((qd_next - m.qd_max()).maxCoeff() <= 1e-7);
        CHECK((m.qd_min() - qd_next).maxCoeff() <= 1e-7);
        CHECK((q_next - m.q_max()).maxCoeff() <= 1e-7);
        CHECK((m.q_min() - q_next).maxCoeff() <= 1e-7);
      }
    }
  }
}

TEST_CASE("environment rows are mapped through the projection") {
  const RobotModel m = generic7();
  std::mt19937_64 rng(16);
  const RobotState s = interior_state(m, rng);
  const ProjectionProblem pr = build_projection(m, s, {0.15}, m.dof() - 1, kTip);

  EnvironmentConstraints env;
  env.A_e.resize(2, 3);
  env.A_e << 0, 0, -1, 0, -1, 0;
  env.b_e.resize(2);
  env.b_e << -0.2, 0.3;

  const ProjectionProblem with = add_environment(pr, env);
  CHECK(with.A.rows() == pr.A.rows() + 2);
  CHECK(with.n_torque_rows == pr.n_torque_rows);
  CHECK((with.A.topRows(pr.A.rows()) - pr.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((with.A.bottomRows(2) - env.A_e * pr.P).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((with.b.tail(2) - (env.b_e - env.A_e * pr.x_star)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(pr.A.rows() == pr.n_torque_rows);

  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd tau =
        oracles::uniform_vec(rng, 1.5 * m.tau_min(), 1.5 * m.tau_max());
    const bool base_ok = ((pr.A * tau - pr.b).array() <= 0.0).all();
    const bool env_ok = ((env.A_e * (pr.P * tau + pr.x_star) - env.b_e).array() <= 0.0).all();
    const bool stacked = ((with.A * tau - with.b).array() <= 1e-12).all();
    CHECK(stacked == (base_ok && env_ok));
  }
}

TEST_CASE("environment row order does not change the feasible set") {
  const RobotModel m = planar2();
  RobotState s;
  s.q = Eigen::Vector2d(0.3, 0.5);
  s.qd = Eigen::Vector2d(0.2, -0.1);
  const ProjectionProblem pr = build_projection(m, s, {0.1}, 1, kTip, 2);

  EnvironmentConstraints e1, e2;
  e1.A_e = Eigen::RowVector2d(1.0, 0.0);
  e1.b_e = Eigen::VectorXd::Constant(1, 1.4);
  e2.A_e = Eigen::RowVector2d(0.0, -1.0);
  e2.b_e = Eigen::VectorXd::Constant(1, 0.1);

  const ProjectionProblem ab = add_environment(add_environment(pr, e1), e2);
  const ProjectionProblem ba = add_environment(add_environment(pr, e2), e1);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::VectorXd tau =
        oracles::uniform_vec(rng, 1.2 * m.tau_min(), 1.2 * m.tau_max());
    const bool in_ab = ((ab.A * tau - ab.b).array() <= 0.0).all();
    const bool in_ba = ((ba.A * tau - ba.b).array() <= 0.0).all();
    CHECK(in_ab == in_ba);
  }
  CHECK(check_feasibility(ab).feasible == check_feasibility(ba).feasible);
}

TEST_CASE("environment dimension mismatches are rejected") {
  const RobotModel m = planar2();
  const ProjectionProblem pr = build_projection(
      m, RobotState{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)}, {0.1}, 1, kTip, 2);

  EnvironmentConstraints bad;
  bad.A_e = Eigen::MatrixXd::Ones(1, 3);
  bad.b_e = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(add_environment(pr, bad), std::invalid_argument);

  bad.A_e = Eigen::MatrixXd::Ones(2, 2);
  bad.b_e = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(add_environment(pr, bad), std::invalid_argument);

  EnvironmentConstraints empty;
  empty.A_e.resize(0, 2);
  empty.b_e.resize(0);
  const ProjectionProblem same = add_environment(pr, empty);
  CHECK(same.A.rows() == pr.A.rows());
  CHECK((same.A - pr.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((same.b - pr.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feasibility uses the bias torque as a fast witness") {
  const RobotModel m = generic7();
  std::mt19937_64 rng(18);
  const RobotState s = interior_state(m, rng, 0.6, 0.2);
  const ProjectionProblem pr = build_projection(m, s, {0.1}, m.dof() - 1, kTip);

  const FeasibilityResult res = check_feasibility(pr);
  REQUIRE(res.feasible);
  CHECK((res.witness - pr.tau_d).cwiseAbs().maxCoeff() == 0.0);
  CHECK(((pr.A * res.witness - pr.b).array() <= 1e-9).all());
}

TEST_CASE("feasibility falls back to a solver when the bias torque is excluded") {
  const RobotModel m = planar2();
  RobotState s;
  s.q = Eigen::Vector2d(0.2, 0.4);
  s.qd = Eigen::Vector2d(0.1, 0.0);
  const ProjectionProblem pr = build_projection(m, s, {0.1}, 1, kTip, 2);
  const Eigen::Vector2d coast = (pr.P * pr.tau_d + pr.x_star).head<2>();

  EnvironmentConstraints env;
  env.A_e = Eigen::RowVector2d(-1.0, 0.0);
  env.b_e = Eigen::VectorXd::Constant(1, -(coast[0] + 1e-3));

  const ProjectionProblem cut = add_environment(pr, env);
  CHECK_FALSE(((cut.A * pr.tau_d - cut.b).array() <= 0.0).all());

  const FeasibilityResult res = check_feasibility(cut);
  REQUIRE(res.feasible);
  CHECK(((cut.A * res.witness - cut.b).array() <= 1e-9).all());
}

TEST_CASE("an unreachable environment makes the problem infeasible") {
  const RobotModel m = planar2();
  RobotState s;
  s.q = Eigen::Vector2d(0.2, 0.4);
  s.qd = Eigen::Vector2d::Zero();
  const ProjectionProblem pr = build_projection(m, s, {0.1}, 1, kTip, 2);

  EnvironmentConstraints env;
  env.A_e = Eigen::RowVector2d(1.0, 0.0);
  env.b_e = Eigen::VectorXd::Constant(1, pr.x_star[0] - 1000.0);

  const FeasibilityResult res = check_feasibility(add_environment(pr, env));
  CHECK_FALSE(res.feasible);
}

TEST_CASE("a fast state at the position limit cannot brake in time") {
  const RobotModel m = planar2();
  RobotState s;
  s.q = m.q_max();
  s.qd = m.qd_max();
  const ProjectionProblem pr = build_projection(m, s, {0.05}, 1, kTip, 2);
  CHECK_FALSE(check_feasibility(pr).feasible);
}

TEST_CASE("invalid horizon arguments are rejected") {
  const RobotModel m = planar2();
  const RobotState s{Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)};
  CHECK_THROWS_AS(build_projection(m, s, {0.0}, 1, kTip, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_projection(m, s, {-0.1}, 1, kTip, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_projection(m, s, {0.1}, 1, kTip, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_projection(m, s, {0.1}, 1, kTip, 4), std::invalid_argument);

  RobotState outside;
  outside.q = Eigen::Vector2d(10.0, 0.0);
  outside.qd = Eigen::Vector2d::Zero();
  CHECK_THROWS_AS(build_projection(m, outside, {0.1}, 1, kTip, 2), std::runtime_error);
}

TEST_SUITE_END();
