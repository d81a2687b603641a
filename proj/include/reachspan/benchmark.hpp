#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "reachspan/metrics.hpp"
#include "reachspan/robot_model.hpp"

namespace reachspan {

/// Settings for a benchmark sweep over random configurations and horizons.
///
/// `frame` of -1 selects the last joint frame. When `cart_limits` holds no
/// entries it is replaced by default_cartesian_limits(task_dim). The timing
/// column is written as zero unless `report_timing` is set, so that by
/// default two runs with the same seed produce byte-identical reports.
/// `threads` of 0 uses the hardware concurrency; the REACHSPAN_THREADS
/// environment variable caps the worker count either way.
struct BenchmarkOptions {
  std::vector<double> horizons{0.05, 0.15, 0.25};
  int configs = 20;
  std::uint64_t seed = 42;
  double delta = 1e-3;
  double dt = 0.005;
  int frame = -1;
  Eigen::Vector3d local_point = Eigen::Vector3d::Zero();
  int task_dim = 3;
  bool random_velocities = false;
  bool report_timing = false;
  CartesianLimits cart_limits;
  int threads = 0;
};

/// Mean and sample standard deviation of the accuracy ratios over all rows
/// that share one horizon. Means over m2 skip rows where it is undefined.
struct HorizonSummary {
  double t_h = 0.0;
  int rows = 0;
  double mean_m1 = 0.0, std_m1 = 0.0;
  double mean_m2 = 0.0, std_m2 = 0.0;
  double mean_m3 = 0.0, std_m3 = 0.0;
  double mean_vol_Px = 0.0;
  double mean_vol_Cx = 0.0;
};

/// Outcome of run_benchmark: one row per completed (configuration, horizon)
/// pair in configuration-major order, per-horizon summaries, messages for
/// skipped pairs, and the CSV rendering of the rows.
struct BenchmarkResult {
  std::vector<MetricsReport> rows;
  std::vector<HorizonSummary> summary;
  std::vector<std::string> warnings;
  std::string csv;
};

/// One cell of a timing table: statistics of the polytope wall time at a
/// fixed horizon and environment row count.
struct TimingCell {
  double t_h = 0.0;
  int env_rows = 0;
  int samples = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

/// Outcome of timing_run: all cells plus their CSV rendering.
struct TimingResult {
  std::vector<TimingCell> cells;
  std::string csv;
};

/// Symmetric per-axis Cartesian bounds used when the caller supplies none:
/// |xdd| <= 25 m/s^2 and |xd| <= 2.5 m/s on every axis.
CartesianLimits default_cartesian_limits(int dim);

/// Draw `count` states with q uniform inside the position box of every
/// joint. Velocities are zero unless `random_velocities` is set, in which
/// case they are uniform inside the velocity box. Configuration i depends
/// only on (seed, i), so a longer draw extends a shorter one.
std::vector<RobotState> random_configurations(const RobotModel& model, int count,
                                              std::uint64_t seed,
                                              bool random_velocities = false);

/// Sweep (configurations x horizons): build the reachable polytope, roll out
/// one simulation per vertex torque, evaluate the accuracy ratios and the
/// Cartesian-box baseline, and render everything as CSV. Pairs that fail
/// (infeasible problem, degenerate geometry) are reported in `warnings` and
/// skipped.
BenchmarkResult run_benchmark(const RobotModel& model,
                              const BenchmarkOptions& options);

/// Measure polytope wall time per (horizon, environment row count) cell over
/// the same random configurations. Environment half-spaces are drawn with
/// uniformly random normals and offsets that keep a known feasible point
/// strictly inside, so every timed problem stays solvable. Runs serially so
/// the samples are undisturbed.
TimingResult timing_run(const RobotModel& model, const std::vector<double>& horizons,
                        int configs, const std::vector<int>& env_row_counts,
                        std::uint64_t seed, double delta = 1e-3);

}  // namespace reachspan
