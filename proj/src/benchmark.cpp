#include "reachspan/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "reachspan/dynamics.hpp"
#include "reachspan/horizon.hpp"
#include "reachspan/ichm.hpp"
#include "reachspan/linprog.hpp"
#include "reachspan/polytope.hpp"
#include "reachspan/simulation.hpp"

namespace reachspan {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix_next(s);
}

double unit_double(std::uint64_t& state) {
  return static_cast<double>(splitmix_next(state) >> 11) * 0x1.0p-53;
}

Eigen::Vector3d random_unit_vector(std::uint64_t& state) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
      const double u1 = std::max(unit_double(state), 1e-300);
      const double u2 = unit_double(state);
      v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    const double n = v.norm();
    if (n > 1e-9) return v / n;
  }
  return Eigen::Vector3d::UnitX();
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int resolve_threads(int requested, int jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("REACHSPAN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::min(n, std::max(1, jobs));
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  if (xs.empty()) {
    mean = std::numeric_limits<double>::quiet_NaN();
    sd = 0.0;
    return;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    sd = 0.0;
    return;
  }
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

CartesianLimits default_cartesian_limits(int dim) {
  CartesianLimits lim;
  lim.xdd_min = Eigen::VectorXd::Constant(dim, -25.0);
  lim.xdd_max = Eigen::VectorXd::Constant(dim, 25.0);
  lim.xd_min = Eigen::VectorXd::Constant(dim, -2.5);
  lim.xd_max = Eigen::VectorXd::Constant(dim, 2.5);
  return lim;
}

std::vector<RobotState> random_configurations(const RobotModel& model, int count,
                                              std::uint64_t seed,
                                              bool random_velocities) {
  if (count < 1)
    throw std::invalid_argument("random_configurations: count must be at least 1");
  const int n = model.dof();
  const Eigen::VectorXd q_lo = model.q_min();
  const Eigen::VectorXd q_hi = model.q_max();
  const Eigen::VectorXd qd_lo = model.qd_min();
  const Eigen::VectorXd qd_hi = model.qd_max();

  std::vector<RobotState> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    std::uint64_t stream = mix_seed(seed, static_cast<std::uint64_t>(k));
    RobotState s;
    s.q.resize(n);
    s.qd = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j)
      s.q[j] = q_lo[j] + unit_double(stream) * (q_hi[j] - q_lo[j]);
    if (random_velocities)
      for (int j = 0; j < n; ++j)
        s.qd[j] = qd_lo[j] + unit_double(stream) * (qd_hi[j] - qd_lo[j]);
    states.push_back(std::move(s));
  }
  return states;
}

BenchmarkResult run_benchmark(const RobotModel& model,
                              const BenchmarkOptions& options) {
  if (options.horizons.empty())
    throw std::invalid_argument("run_benchmark: no horizons given");
  for (double t_h : options.horizons)
    if (!(t_h > 0.0) || !std::isfinite(t_h))
      throw std::invalid_argument("run_benchmark: horizons must be positive and finite");
  if (options.configs < 1)
    throw std::invalid_argument("run_benchmark: need at least one configuration");
  if (options.task_dim != 2 && options.task_dim != 3)
    throw std::invalid_argument("run_benchmark: task_dim must be 2 or 3");

  const int frame = options.frame < 0 ? model.dof() - 1 : options.frame;
  const CartesianLimits limits = options.cart_limits.xdd_min.size() > 0
                                     ? options.cart_limits
                                     : default_cartesian_limits(options.task_dim);
  for (double t_h : options.horizons)
    cube_baseline(Eigen::VectorXd::Zero(options.task_dim),
                  Eigen::VectorXd::Zero(options.task_dim), limits, t_h);

  const std::vector<RobotState> states = random_configurations(
      model, options.configs, options.seed, options.random_velocities);

  std::vector<std::vector<MetricsReport>> rows_by_cfg(states.size());
  std::vector<std::vector<std::string>> warn_by_cfg(states.size());
  std::atomic<int> next{0};

  auto work = [&]() {
    for (;;) {
      const int cfg = next.fetch_add(1);
      if (cfg >= options.configs) return;
      const RobotState& state = states[static_cast<std::size_t>(cfg)];
      for (double t_h : options.horizons) {
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const ProjectionProblem pr = build_projection(
              model, state, {t_h}, frame, options.local_point, options.task_dim);
          const Polytope poly = ichm(pr, options.delta);
          const double secs =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
          if (poly.empty()) {
            warn_by_cfg[static_cast<std::size_t>(cfg)].push_back(
                "config " + std::to_string(cfg) + ", t_h " + format_value(t_h) +
                ": no feasible torque, pair skipped");
            continue;
          }
          const ReachedSet reached = collect_reached(model, state, poly, t_h,
                                                     options.dt, frame,
                                                     options.local_point);
          MetricsReport row = evaluate_metrics(reached, poly, options.delta);
          row.config_id = cfg;
          row.seed = options.seed;
          row.t_h = t_h;
          row.wall_time_polytope = options.report_timing ? secs : 0.0;

          const Eigen::VectorXd x_k =
              forward_kinematics(model, state.q, frame, options.local_point)
                  .head(options.task_dim);
          const Eigen::VectorXd xd_k =
              jacobian(model, state.q, frame, options.local_point)
                  .topRows(options.task_dim) *
              state.qd;
          row.vol_Cx = volume(cube_baseline(x_k, xd_k, limits, t_h));
          rows_by_cfg[static_cast<std::size_t>(cfg)].push_back(std::move(row));
        } catch (const std::exception& e) {
          warn_by_cfg[static_cast<std::size_t>(cfg)].push_back(
              "config " + std::to_string(cfg) + ", t_h " + format_value(t_h) +
              ": " + e.what());
        }
      }
    }
  };

  const int n_threads = resolve_threads(options.threads, options.configs);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  BenchmarkResult result;
  for (std::size_t cfg = 0; cfg < rows_by_cfg.size(); ++cfg) {
    for (MetricsReport& row : rows_by_cfg[cfg]) result.rows.push_back(std::move(row));
    for (std::string& w : warn_by_cfg[cfg]) result.warnings.push_back(std::move(w));
  }

  for (double t_h : options.horizons) {
    HorizonSummary s;
    s.t_h = t_h;
    std::vector<double> m1s, m2s, m3s, vps, vcs;
    for (const MetricsReport& row : result.rows) {
      if (row.t_h != t_h) continue;
      ++s.rows;
      m1s.push_back(row.m1);
      if (!std::isnan(row.m2)) m2s.push_back(row.m2);
      m3s.push_back(row.m3);
      vps.push_back(row.vol_Px);
      vcs.push_back(row.vol_Cx);
    }
    double ignored = 0.0;
    mean_std(m1s, s.mean_m1, s.std_m1);
    mean_std(m2s, s.mean_m2, s.std_m2);
    mean_std(m3s, s.mean_m3, s.std_m3);
    mean_std(vps, s.mean_vol_Px, ignored);
    mean_std(vcs, s.mean_vol_Cx, ignored);
    result.summary.push_back(s);
  }

  std::ostringstream csv;
  csv << "config_id, seed, t_h, n_vertices, m1, m2, m3, vol_Px, vol_R1, vol_R2, "
         "vol_Cx, poly_ms\n";
  for (const MetricsReport& r : result.rows) {
    csv << r.config_id << ", " << r.seed << ", " << format_value(r.t_h) << ", "
        << r.n_vertices << ", " << format_value(r.m1) << ", "
        << format_value(r.m2) << ", " << format_value(r.m3) << ", "
        << format_value(r.vol_Px) << ", " << format_value(r.vol_R1) << ", "
        << format_value(r.vol_R2) << ", " << format_value(r.vol_Cx) << ", "
        << format_value(r.wall_time_polytope * 1000.0) << "\n";
  }
  result.csv = csv.str();
  return result;
}

TimingResult timing_run(const RobotModel& model, const std::vector<double>& horizons,
                        int configs, const std::vector<int>& env_row_counts,
                        std::uint64_t seed, double delta) {
  if (horizons.empty() || env_row_counts.empty())
    throw std::invalid_argument("timing_run: horizon and row-count lists must be nonempty");
  for (double t_h : horizons)
    if (!(t_h > 0.0) || !std::isfinite(t_h))
      throw std::invalid_argument("timing_run: horizons must be positive and finite");
  for (int rows : env_row_counts)
    if (rows < 0)
      throw std::invalid_argument("timing_run: row counts must be nonnegative");
  if (configs < 1)
    throw std::invalid_argument("timing_run: need at least one configuration");

  const int frame = model.dof() - 1;
  const Eigen::Vector3d local = Eigen::Vector3d::Zero();
  const std::vector<RobotState> states = random_configurations(model, configs, seed);

  TimingResult result;
  std::ostringstream csv;
  csv << "t_h, env_rows, samples, mean_ms, std_ms\n";

  // One untimed enumeration up front so allocator and cache warm-up does not
  // land in the first measured cell.
  try {
    const ProjectionProblem warm =
        build_projection(model, states.front(), {horizons.front()}, frame, local, 3);
    if (check_feasibility(warm).feasible) (void)ichm(warm, delta);
  } catch (const std::exception&) {
  }

  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const double t_h = horizons[h];
    for (std::size_t e = 0; e < env_row_counts.size(); ++e) {
      const int rows = env_row_counts[e];
      std::vector<double> samples;
      for (int cfg = 0; cfg < configs; ++cfg) {
        std::uint64_t stream =
            mix_seed(mix_seed(mix_seed(seed, h), e), static_cast<std::uint64_t>(cfg));
        try {
          const ProjectionProblem pr = build_projection(
              model, states[static_cast<std::size_t>(cfg)], {t_h}, frame, local, 3);
          const FeasibilityResult feas = check_feasibility(pr);
          if (!feas.feasible) continue;
          const Eigen::Vector3d x_wit = pr.P * feas.witness + pr.x_star;

          // Obstacle offsets scale with the reachable set itself (probed as
          // an axis-aligned bounding box), so every horizon sees the same
          // mix of cutting and distant half-spaces.
          SupportSolver box_probe(pr.A, pr.b);
          double extent = 0.0;
          for (int axis = 0; axis < 3; ++axis) {
            double width = 0.0;
            for (const double sign : {1.0, -1.0}) {
              const Eigen::VectorXd c =
                  pr.P.transpose() * (sign * Eigen::Vector3d::Unit(axis));
              const LpResult r = box_probe.maximize(c);
              if (r.status != LpStatus::Optimal) throw std::runtime_error(
                  "timing_run: support probe failed on a feasible problem");
              width += r.value - sign * (pr.P.row(axis) * feas.witness).value();
            }
            extent = std::max(extent, width);
          }
          extent = std::max(extent, 0.05);

          EnvironmentConstraints env;
          env.A_e.resize(rows, 3);
          env.b_e.resize(rows);
          for (int i = 0; i < rows; ++i) {
            const Eigen::Vector3d n = random_unit_vector(stream);
            env.A_e.row(i) = n;
            env.b_e[i] = n.dot(x_wit) + extent * (0.5 + 0.9 * unit_double(stream));
          }

          const auto t0 = std::chrono::steady_clock::now();
          const ProjectionProblem prob =
              rows > 0 ? add_environment(pr, env) : pr;
          const Polytope poly = ichm(prob, delta);
          const double ms =
              std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
          (void)poly;
          samples.push_back(ms);
        } catch (const std::exception&) {
          continue;
        }
      }

      TimingCell cell;
      cell.t_h = t_h;
      cell.env_rows = rows;
      cell.samples = static_cast<int>(samples.size());
      mean_std(samples, cell.mean_ms, cell.std_ms);
      result.cells.push_back(cell);
      csv << format_value(t_h) << ", " << rows << ", " << cell.samples << ", "
          << format_value(cell.mean_ms) << ", " << format_value(cell.std_ms) << "\n";
    }
  }
  result.csv = csv.str();
  return result;
}

}  // namespace reachspan
