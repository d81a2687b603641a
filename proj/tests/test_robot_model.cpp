#include <doctest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "reachspan/dynamics.hpp"
#include "reachspan/robot_model.hpp"

using namespace reachspan;

namespace {

std::string joint_json(const std::string& q_range) {
  return R"({"origin": {"xyz": [0,0,0.2], "rpy": [0,0,0]}, "axis": [0,0,1],
             "mass": 1.0, "com": [0,0,0.1], "inertia": [0.01,0.01,0.005,0,0,0],
             "tau": [-5,5], "qd": [-2,2], "q": )" + q_range + "}";
}

std::string chain_json(int n, int bad_joint = -1) {
  std::string joints;
  for (int i = 0; i < n; ++i) {
    if (i) joints += ",";
    joints += joint_json(i == bad_joint ? "[1.0, -1.0]" : "[-1.0, 1.0]");
  }
  return R"({"name": "chain", "gravity": [0,0,-9.81], "joints": [)" + joints + "]}";
}

}  // namespace

TEST_SUITE_BEGIN("robot_model");

TEST_CASE("planar2 fixture loads with expected layout") {
  const RobotModel m = load_robot(oracles::data_path("planar2.json"));
  CHECK(m.name == "planar2");
  CHECK(m.dof() == 2);
  CHECK(m.gravity.isApprox(Eigen::Vector3d(0, 0, -9.81)));
  CHECK(m.joints[1].origin_xyz.isApprox(Eigen::Vector3d(1, 0, 0)));
  CHECK(m.tau_max().isApprox(Eigen::Vector2d(10, 10)));
  CHECK(m.q_min().isApprox(Eigen::Vector2d(-2.5, -2.5)));
}

TEST_CASE("generic7 fixture loads and passes validation") {
  const RobotModel m = load_robot(oracles::data_path("generic7.json"));
  CHECK(m.dof() == 7);
  CHECK(m.tau_max()[0] == doctest::Approx(87.0));
  CHECK(m.qd_max()[6] == doctest::Approx(2.6));
}

TEST_CASE("inverted position range is reported with the joint index") {
  try {
    parse_robot(chain_json(5, 3));
    FAIL("expected validation error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("joint 3") != std::string::npos);
    CHECK(std::string(e.what()).find("q_min") != std::string::npos);
  }
}

TEST_CASE("malformed JSON reports a parse position") {
  try {
    parse_robot("{\"name\": \"x\", ", "inline");
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
}

TEST_CASE("missing fields are named") {
  CHECK_THROWS_WITH_AS(parse_robot(R"({"gravity": [0,0,0]})", "f"),
                       doctest::Contains("joints"), std::runtime_error);
  CHECK_THROWS_AS(
      parse_robot(R"({"gravity": [0,0,0], "joints": [{"origin": {"xyz": [0,0,0], "rpy": [0,0,0]}}]})"),
      std::runtime_error);
}

TEST_CASE("non-unit axis is rejected") {
  std::string text = chain_json(1);
  const auto pos = text.find("[0,0,1]");
  text.replace(pos, 7, "[0,0,2]");
  CHECK_THROWS_WITH_AS(parse_robot(text), doctest::Contains("axis"), std::runtime_error);
}

TEST_CASE("indefinite inertia is rejected") {
  std::string text = chain_json(1);
  const auto pos = text.find("[0.01,0.01,0.005,0,0,0]");
  text.replace(pos, 23, "[0.01,0.01,-0.005,0,0,0]");
  CHECK_THROWS_WITH_AS(parse_robot(text), doctest::Contains("positive semidefinite"),
                       std::runtime_error);
}

TEST_CASE("check_state enforces the limit boxes") {
  const RobotModel m = load_robot(oracles::data_path("planar2.json"));
  RobotState s{Eigen::Vector2d(0.5, -0.5), Eigen::Vector2d(1.0, 1.0)};
  CHECK_NOTHROW(check_state(m, s));
  s.q[0] = 2.6;
  CHECK_THROWS_AS(check_state(m, s), std::runtime_error);
  s.q[0] = 0.5;
  s.qd[1] = -3.5;
  CHECK_THROWS_AS(check_state(m, s), std::runtime_error);
  // exact boundary is allowed
  s.qd[1] = -3.0;
  CHECK_NOTHROW(check_state(m, s));
}

TEST_CASE("zero payload leaves the dynamics unchanged") {
  const RobotModel m = load_robot(oracles::data_path("generic7.json"));
  const RobotModel m2 = augment_payload(m, 0.0, Eigen::Vector3d(0.1, 0, 0.2),
                                        Eigen::Matrix3d::Zero());
  std::mt19937_64 rng(7);
  const Eigen::VectorXd q = oracles::random_config(m, rng);
  const Eigen::VectorXd qd = Eigen::VectorXd::Constant(7, 0.3);
  CHECK((mass_matrix(m, q) - mass_matrix(m2, q)).norm() == doctest::Approx(0.0));
  CHECK((bias_torque(m, q, qd) - bias_torque(m2, q, qd)).norm() == doctest::Approx(0.0));
}

TEST_CASE("payload composition matches a point-mass closed form") {
  // One-link arm: point mass m1 at the tip plus payload m2 at the same spot
  // must behave like a single mass m1+m2.
  RobotModel m = parse_robot(chain_json(1));
  m.joints[0].link_com = Eigen::Vector3d(1, 0, 0);
  m.joints[0].link_inertia.setZero();
  m.joints[0].link_mass = 1.0;

  const RobotModel loaded = augment_payload(m, 2.0, Eigen::Vector3d(1, 0, 0),
                                            Eigen::Matrix3d::Zero());
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  CHECK(mass_matrix(loaded, q)(0, 0) == doctest::Approx(3.0).epsilon(1e-12));

  // Payload at a different spot: parallel-axis growth of the combined body.
  const RobotModel shifted = augment_payload(m, 1.0, Eigen::Vector3d(2, 0, 0),
                                             Eigen::Matrix3d::Zero());
  // two unit masses at radii 1 and 2 about the joint axis
  CHECK(mass_matrix(shifted, q)(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(shifted.joints[0].link_com.isApprox(Eigen::Vector3d(1.5, 0, 0)));
  CHECK(shifted.joints[0].link_mass == doctest::Approx(2.0));
}

TEST_CASE("payload increases every diagonal inertia entry") {
  const RobotModel m = load_robot(oracles::data_path("generic7.json"));
  const RobotModel heavy =
      augment_payload(m, 5.0, Eigen::Vector3d(0, 0, 0.12), 0.01 * Eigen::Matrix3d::Identity());
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd q = oracles::random_config(m, rng);
    const Eigen::MatrixXd d = mass_matrix(heavy, q) - mass_matrix(m, q);
    CHECK(d.diagonal().minCoeff() >= -1e-12);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(mass_matrix(heavy, q)).info() == Eigen::Success);
  }
}

TEST_SUITE_END();
