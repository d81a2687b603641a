#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reachspan/benchmark.hpp"

using namespace reachspan;

namespace {

RobotModel planar2() { return load_robot(oracles::data_path("planar2.json")); }

BenchmarkOptions planar_options() {
  BenchmarkOptions opt;
  opt.horizons = {0.04, 0.08};
  opt.configs = 4;
  opt.seed = 7;
  opt.dt = 0.004;
  opt.task_dim = 2;
  opt.local_point = Eigen::Vector3d(1, 0, 0);
  return opt;
}

std::size_t line_count(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) lines += (c == '\n');
  return lines;
}

}  // namespace

TEST_SUITE_BEGIN("benchmark");

TEST_CASE("random configurations are deterministic and respect limits") {
  const RobotModel m = planar2();

  const std::vector<RobotState> a = random_configurations(m, 5, 42);
  const std::vector<RobotState> b = random_configurations(m, 5, 42);
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK((a[k].q - b[k].q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a[k].qd.cwiseAbs().maxCoeff() == 0.0);
  }

  const std::vector<RobotState> longer = random_configurations(m, 8, 42);
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK((a[k].q - longer[k].q).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<RobotState> many = random_configurations(m, 500, 3);
  for (const RobotState& s : many) {
    CHECK((s.q.array() >= m.q_min().array()).all());
    CHECK((s.q.array() <= m.q_max().array()).all());
  }

  const std::vector<RobotState> moving = random_configurations(m, 50, 3, true);
  double qd_spread = 0.0;
  for (const RobotState& s : moving) {
    CHECK((s.qd.array() >= m.qd_min().array()).all());
    CHECK((s.qd.array() <= m.qd_max().array()).all());
    qd_spread = std::max(qd_spread, s.qd.cwiseAbs().maxCoeff());
  }
  CHECK(qd_spread > 0.0);

  CHECK_THROWS_AS(random_configurations(m, 0, 42), std::invalid_argument);
}

TEST_CASE("per-joint sample mean approaches the box center") {
  const RobotModel m = planar2();
  const std::vector<RobotState> states = random_configurations(m, 10000, 9);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m.dof());
  for (const RobotState& s : states) mean += s.q;
  mean /= static_cast<double>(states.size());

  const Eigen::VectorXd center = 0.5 * (m.q_min() + m.q_max());
  const Eigen::VectorXd span = m.q_max() - m.q_min();
  for (int j = 0; j < m.dof(); ++j)
    CHECK(std::abs(mean[j] - center[j]) < 0.05 * span[j]);
}

TEST_CASE("benchmark sweep on the planar arm") {
  const RobotModel m = planar2();
  const BenchmarkOptions opt = planar_options();
  const BenchmarkResult result = run_benchmark(m, opt);

  CHECK(result.warnings.empty());
  REQUIRE(result.rows.size() == 8);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const MetricsReport& r = result.rows[i];
    CHECK(r.config_id == static_cast<int>(i / 2));
    CHECK(r.t_h == opt.horizons[i % 2]);
    CHECK(r.seed == opt.seed);
    CHECK(r.n_vertices >= 3);
    CHECK(r.m1 >= 0.0);
    CHECK(r.m1 <= 1.0);
    CHECK(r.m2 >= 0.0);
    CHECK(r.m2 <= 1.0);
    CHECK(r.m3 > 0.0);
    CHECK(r.vol_Px > 0.0);
    CHECK(r.vol_R1 <= r.vol_Px * (1.0 + 1e-9));
    CHECK(r.vol_R2 > 0.0);
    CHECK(r.vol_Cx > 0.0);
    CHECK(r.wall_time_polytope >= 0.0);
  }

  REQUIRE(result.summary.size() == 2);
  for (const HorizonSummary& s : result.summary) {
    CHECK(s.rows == 4);
    CHECK(s.mean_m1 >= 0.0);
    CHECK(s.mean_m1 <= 1.0);
    CHECK(s.std_m1 >= 0.0);
    CHECK(s.mean_m3 > 0.0);
    CHECK(s.mean_vol_Px > 0.0);
    CHECK(s.mean_vol_Cx > 0.0);
  }

  const std::string header =
      "config_id, seed, t_h, n_vertices, m1, m2, m3, vol_Px, vol_R1, vol_R2, "
      "vol_Cx, poly_ms\n";
  REQUIRE(result.csv.compare(0, header.size(), header) == 0);
  CHECK(line_count(result.csv) == 1 + result.rows.size());

  std::istringstream stream(result.csv);
  std::string line;
  std::getline(stream, line);
  std::getline(stream, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 11);

  BenchmarkOptions timed = opt;
  timed.configs = 1;
  timed.horizons = {0.04};
  timed.report_timing = true;
  const BenchmarkResult with_time = run_benchmark(m, timed);
  REQUIRE(with_time.rows.size() == 1);
  CHECK(with_time.rows[0].wall_time_polytope > 0.0);
}

TEST_CASE("same seed gives byte-identical reports") {
  const RobotModel m = planar2();
  BenchmarkOptions opt = planar_options();
  opt.report_timing = false;

  const BenchmarkResult first = run_benchmark(m, opt);
  const BenchmarkResult second = run_benchmark(m, opt);
  CHECK(first.csv == second.csv);

  opt.threads = 1;
  const BenchmarkResult serial = run_benchmark(m, opt);
  opt.threads = 4;
  const BenchmarkResult parallel = run_benchmark(m, opt);
  CHECK(serial.csv == first.csv);
  CHECK(parallel.csv == first.csv);
}

TEST_CASE("timing covers every horizon and row-count cell") {
  const RobotModel m = planar2();
  const TimingResult timing = timing_run(m, {0.05}, 2, {0, 6}, 11);

  REQUIRE(timing.cells.size() == 2);
  CHECK(timing.cells[0].env_rows == 0);
  CHECK(timing.cells[1].env_rows == 6);
  for (const TimingCell& cell : timing.cells) {
    CHECK(cell.t_h == 0.05);
    CHECK(cell.samples == 2);
    CHECK(cell.mean_ms > 0.0);
    CHECK(cell.std_ms >= 0.0);
  }
  CHECK(line_count(timing.csv) == 3);
}

TEST_CASE("sweep and timing argument validation") {
  const RobotModel m = planar2();

  BenchmarkOptions opt = planar_options();
  opt.horizons.clear();
  CHECK_THROWS_AS(run_benchmark(m, opt), std::invalid_argument);
  opt = planar_options();
  opt.horizons = {-0.1};
  CHECK_THROWS_AS(run_benchmark(m, opt), std::invalid_argument);
  opt = planar_options();
  opt.configs = 0;
  CHECK_THROWS_AS(run_benchmark(m, opt), std::invalid_argument);
  opt = planar_options();
  opt.task_dim = 1;
  CHECK_THROWS_AS(run_benchmark(m, opt), std::invalid_argument);

  CHECK_THROWS_AS(timing_run(m, {}, 2, {0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(timing_run(m, {0.05}, 2, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(timing_run(m, {0.05}, 2, {-1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(timing_run(m, {0.05}, 0, {0}, 1), std::invalid_argument);
}

TEST_SUITE_END();
