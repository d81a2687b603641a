#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "reachspan/convex_hull.hpp"
#include "reachspan/horizon.hpp"
#include "reachspan/ichm.hpp"
#include "reachspan/metrics.hpp"
#include "reachspan/simulation.hpp"

using namespace reachspan;

namespace {

const Eigen::Vector3d kTip(1, 0, 0);

RobotModel planar2() { return load_robot(oracles::data_path("planar2.json")); }

CartesianLimits symmetric_limits(int m, double a, double v) {
  CartesianLimits lim;
  lim.xdd_min = Eigen::VectorXd::Constant(m, -a);
  lim.xdd_max = Eigen::VectorXd::Constant(m, a);
  lim.xd_min = Eigen::VectorXd::Constant(m, -v);
  lim.xd_max = Eigen::VectorXd::Constant(m, v);
  return lim;
}

Polytope unit_box_polytope(double scale_z = 1.0) {
  ProjectionProblem pr;
  pr.P = Eigen::Matrix3d::Identity();
  pr.P(2, 2) = scale_z;
  pr.x_star = Eigen::Vector3d::Zero();
  pr.A.resize(6, 3);
  pr.A << Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity();
  pr.b = Eigen::VectorXd::Ones(6);
  pr.n_torque_rows = 6;
  pr.tau_d = Eigen::Vector3d::Zero();
  return ichm(pr, 1e-3);
}

ReachedSet points_as_set(const std::vector<Eigen::VectorXd>& pts) {
  ReachedSet rs;
  rs.steps = 1;
  rs.n_vertices = static_cast<int>(pts.size());
  rs.points.resize(pts.empty() ? 3 : pts.front().size(),
                   static_cast<Eigen::Index>(pts.size()));
  rs.vertex_of.resize(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    rs.points.col(static_cast<Eigen::Index>(k)) = pts[k];
    rs.vertex_of[k] = static_cast<int>(k);
  }
  return rs;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("baseline box matches the closed form") {
  const CartesianLimits lim = symmetric_limits(3, 10.0, 1.0);
  const Polytope box = cube_baseline(Eigen::Vector3d::Zero(),
                                     Eigen::Vector3d::Zero(), lim, 0.2);
  REQUIRE(box.affine_dim == 3);
  CHECK(volume(box) == doctest::Approx(0.008).epsilon(1e-12));
  CHECK(box.vertices.size() == 8);
  for (const Eigen::VectorXd& v : box.vertices)
    for (int i = 0; i < 3; ++i) CHECK(std::abs(std::abs(v[i]) - 0.1) < 1e-12);
  CHECK(contains(box, Eigen::Vector3d(0.09, 0, 0), 0.0));
  CHECK(!contains(box, Eigen::Vector3d(0.11, 0, 0), 0.0));
}

TEST_CASE("initial velocity translates the baseline box") {
  const CartesianLimits lim = symmetric_limits(3, 10.0, 1.0);
  const double t_h = 0.2;
  const Eigen::Vector3d xd(0.5, -0.2, 0.3);
  const Polytope still = cube_baseline(Eigen::Vector3d::Zero(),
                                       Eigen::Vector3d::Zero(), lim, t_h);
  const Polytope moving =
      cube_baseline(Eigen::Vector3d::Zero(), xd, lim, t_h);
  CHECK(volume(moving) == doctest::Approx(volume(still)).epsilon(1e-12));

  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const Eigen::VectorXd& v : moving.vertices) center += v.head<3>();
  center /= static_cast<double>(moving.vertices.size());
  CHECK((center - xd * t_h).norm() < 1e-12);
}

TEST_CASE("baseline volume scales with the sixth power of the horizon") {
  const CartesianLimits lim = symmetric_limits(3, 10.0, 1.0);
  const Polytope small = cube_baseline(Eigen::Vector3d::Zero(),
                                       Eigen::Vector3d::Zero(), lim, 0.05);
  const Polytope big = cube_baseline(Eigen::Vector3d::Zero(),
                                     Eigen::Vector3d::Zero(), lim, 0.1);
  CHECK(volume(small) == doctest::Approx(std::pow(0.025, 3)).epsilon(1e-12));
  CHECK(volume(big) / volume(small) == doctest::Approx(64.0).epsilon(1e-9));
}

TEST_CASE("baseline can bound the final velocity instead of the gain") {
  const CartesianLimits lim = symmetric_limits(3, 10.0, 1.0);
  const double t_h = 0.2;
  const Eigen::Vector3d xd(1.0, 0.0, 0.0);
  const Polytope box =
      cube_baseline(Eigen::Vector3d::Zero(), xd, lim, t_h, true);

  double x_lo = 1e300, x_hi = -1e300;
  for (const Eigen::VectorXd& v : box.vertices) {
    x_lo = std::min(x_lo, v[0]);
    x_hi = std::max(x_hi, v[0]);
  }
  CHECK(std::abs(x_hi - 0.2) < 1e-12);
  CHECK(std::abs(x_lo - 0.0) < 1e-12);
  CHECK(volume(box) == doctest::Approx(0.008).epsilon(1e-12));
}

TEST_CASE("baseline works in the plane") {
  const CartesianLimits lim = symmetric_limits(2, 10.0, 1.0);
  const Polytope box = cube_baseline(Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero(), lim, 0.2);
  REQUIRE(box.dim == 2);
  REQUIRE(box.affine_dim == 2);
  CHECK(volume(box) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("baseline rejects inconsistent limits and bad arguments") {
  CartesianLimits lim = symmetric_limits(3, 10.0, 1.0);
  lim.xdd_min = Eigen::Vector3d::Constant(5.0);
  lim.xd_max = Eigen::Vector3d::Constant(0.1);
  CHECK_THROWS_AS(cube_baseline(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                lim, 1.0),
                  std::invalid_argument);

  const CartesianLimits good = symmetric_limits(3, 10.0, 1.0);
  CHECK_THROWS_AS(cube_baseline(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                good, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cube_baseline(Eigen::Vector3d::Zero(), Eigen::Vector2d::Zero(),
                                good, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cube_baseline(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4),
                                symmetric_limits(4, 10.0, 1.0), 0.1),
                  std::invalid_argument);
}

TEST_CASE("ratios are exact on the polytope's own vertices") {
  const Polytope box = unit_box_polytope();
  REQUIRE(box.affine_dim == 3);
  const ReachedSet own = points_as_set(box.vertices);

  CHECK(metric_m1(own, box, 1e-9) == 1.0);
  CHECK(metric_m2(own, box) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(metric_m3(own, box) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ratios on a far-away congruent cloud") {
  const Polytope box = unit_box_polytope();
  std::vector<Eigen::VectorXd> shifted;
  for (const Eigen::VectorXd& v : box.vertices)
    shifted.push_back(v + Eigen::Vector3d::Constant(100.0));
  const ReachedSet far = points_as_set(shifted);

  CHECK(metric_m1(far, box, 1e-9) == 0.0);
  CHECK(metric_m2(far, box) == 0.0);
  CHECK(metric_m3(far, box) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate clouds and polytopes") {
  const Polytope box = unit_box_polytope();
  const ReachedSet lump = points_as_set(
      std::vector<Eigen::VectorXd>(5, Eigen::Vector3d(0.1, 0.2, -0.3)));

  CHECK(metric_m1(lump, box, 1e-9) == 1.0);
  CHECK(metric_m2(lump, box) == 0.0);
  CHECK_THROWS_AS(metric_m3(lump, box), std::runtime_error);

  const Polytope flat = unit_box_polytope(0.0);
  REQUIRE(flat.affine_dim == 2);
  CHECK(std::isnan(metric_m2(lump, flat)));

  const ReachedSet none = points_as_set({});
  CHECK_THROWS_AS(metric_m1(none, box, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(metric_m2(none, box), std::invalid_argument);
  CHECK_THROWS_AS(metric_m3(none, box), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_metrics(none, box, 1e-9), std::invalid_argument);
}

TEST_CASE("chunked hulling matches a single pass") {
  std::mt19937_64 rng(314);
  const int n = 20000;
  Eigen::MatrixXd cloud(3, n);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::Vector3d p(oracles::uniform(rng, -1, 1), oracles::uniform(rng, -1, 1),
                      oracles::uniform(rng, -1, 1));
    cloud.col(k) = p;
    pts.push_back(p);
  }
  const Polytope chunked = hull_of_columns(cloud);
  const Polytope direct = convex_hull(pts);
  CHECK(chunked.vertices.size() == direct.vertices.size());
  CHECK(volume(chunked) == doctest::Approx(volume(direct)).epsilon(1e-12));

  CHECK_THROWS_AS(hull_of_columns(Eigen::MatrixXd(3, 0)), std::invalid_argument);
}

TEST_CASE("short-horizon rollouts stay inside the polytope") {
  const RobotModel m = planar2();
  RobotState s;
  s.q = Eigen::Vector2d(0.4, 0.8);
  s.qd = Eigen::Vector2d::Zero();
  const double t_h = 0.05, dt = 0.001, delta = 1e-3;

  const Polytope poly = ichm(build_projection(m, s, {t_h}, 1, kTip, 2), delta);
  REQUIRE(poly.affine_dim == 2);
  const ReachedSet reached = collect_reached(m, s, poly, t_h, dt, 1, kTip);

  const int steps = reached.steps;
  for (int k = 0; k < reached.n_vertices; ++k)
    CHECK(contains(poly, reached.points.col(k * steps), delta));

  const double m1 = metric_m1(reached, poly, delta);
  CHECK(m1 >= 0.9);

  const MetricsReport report = evaluate_metrics(reached, poly, delta);
  CHECK(report.m1 == m1);
  CHECK(report.m2 == metric_m2(reached, poly));
  CHECK(report.m3 == metric_m3(reached, poly));
  CHECK(report.n_vertices == static_cast<int>(poly.vertices.size()));
  CHECK(report.vol_Px == volume(poly));
  CHECK(report.m2 >= 0.0);
  CHECK(report.m2 <= 1.0);
  CHECK(report.m3 > 0.0);
  CHECK(report.vol_R1 <= report.vol_Px * (1.0 + 1e-9));
}

TEST_CASE("halving the horizon does not hurt containment") {
  const RobotModel m = planar2();
  int usable = 0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    std::mt19937_64 rng(2024 + cfg);
    RobotState s;
    s.q = oracles::random_config(m, rng);
    s.qd = Eigen::VectorXd::Zero(2);

    double m1_pair[2] = {0, 0};
    bool ok = true;
    const double horizons[2] = {0.05, 0.025};
    for (int h = 0; h < 2 && ok; ++h) {
      const double t_h = horizons[h];
      const Polytope poly =
          ichm(build_projection(m, s, {t_h}, 1, kTip, 2), 1e-3);
      if (poly.empty()) {
        ok = false;
        break;
      }
      const ReachedSet reached =
          collect_reached(m, s, poly, t_h, t_h / 20.0, 1, kTip);
      m1_pair[h] = metric_m1(reached, poly, 1e-3);
    }
    if (!ok) continue;
    ++usable;
    CHECK(m1_pair[1] >= m1_pair[0] - 0.05);
  }
  CHECK(usable >= 15);
}

TEST_SUITE_END();
