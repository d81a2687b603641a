#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachspan/benchmark.hpp"
#include "reachspan/dynamics.hpp"
#include "reachspan/horizon.hpp"
#include "reachspan/ichm.hpp"
#include "reachspan/metrics.hpp"
#include "reachspan/polytope.hpp"
#include "reachspan/robot_model.hpp"
#include "reachspan/scenario.hpp"

namespace {

using namespace reachspan;

constexpr int kExitRuntimeError = 2;
constexpr int kExitEmptyResult = 3;

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::runtime_error(std::string(flag) + ": cannot parse '" + item +
                               "' as a number");
    }
  }
  if (values.empty())
    throw std::runtime_error(std::string(flag) + ": empty list");
  return values;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> values;
  for (double v : parse_double_list(text, flag)) {
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v)
      throw std::runtime_error(std::string(flag) + ": expected integers");
    values.push_back(n);
  }
  return values;
}

std::set<std::string> parse_formats(const std::string& text) {
  std::set<std::string> formats;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item != "obj" && item != "json" && item != "csv")
      throw std::runtime_error("--format: unknown format '" + item + "'");
    formats.insert(item);
  }
  if (formats.empty()) throw std::runtime_error("--format: empty list");
  return formats;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_horizon(double t_h) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t_h);
  return buf;
}

std::string flat_polygon_obj(const Polytope& poly) {
  std::string out;
  char line[128];
  for (const Eigen::VectorXd& v : poly.vertices) {
    std::snprintf(line, sizeof line, "v %.17g %.17g 0\n", v[0], v[1]);
    out += line;
  }
  out += "f";
  for (std::size_t k = 1; k <= poly.vertices.size(); ++k) {
    std::snprintf(line, sizeof line, " %zu", k);
    out += line;
  }
  out += "\n";
  return out;
}

void append_scene_object(std::string& scene, const Polytope& poly,
                         const std::string& name, int& vertex_offset) {
  scene += "o " + name + "\n";
  char line[128];
  for (const Eigen::VectorXd& v : poly.vertices) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    scene += line;
  }
  for (const std::vector<int>& f : poly.faces) {
    std::snprintf(line, sizeof line, "f %d %d %d\n", f[0] + 1 + vertex_offset,
                  f[1] + 1 + vertex_offset, f[2] + 1 + vertex_offset);
    scene += line;
  }
  vertex_offset += static_cast<int>(poly.vertices.size());
}

struct MeshOutcome {
  bool obj_written = false;
  bool solid = false;
};

MeshOutcome write_polytope_files(const Polytope& poly,
                                 const std::filesystem::path& out_dir,
                                 const std::string& stem,
                                 const std::set<std::string>& formats) {
  MeshOutcome outcome;
  outcome.solid = poly.affine_dim == poly.dim;
  if (formats.count("json"))
    write_text_file(out_dir / (stem + ".json"), export_json(poly));
  if (formats.count("obj")) {
    if (poly.dim == 3 && poly.affine_dim == 3) {
      write_text_file(out_dir / (stem + ".obj"), export_obj(poly));
      outcome.obj_written = true;
    } else if (poly.dim == 2 && poly.affine_dim == 2) {
      write_text_file(out_dir / (stem + ".obj"), flat_polygon_obj(poly));
      outcome.obj_written = true;
    } else {
      std::cout << stem << ": polytope is not full-dimensional, OBJ skipped\n";
    }
  }
  return outcome;
}

Polytope solve_scenario(const Scenario& scenario, double t_h, double delta,
                        double* wall_seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  ProjectionProblem problem =
      build_projection(scenario.model, scenario.state, {t_h}, scenario.frame,
                       scenario.local_point, scenario.task_dim);
  if (scenario.has_environment)
    problem = add_environment(problem, scenario.environment);
  Polytope poly = ichm(problem, delta);
  if (wall_seconds)
    *wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  return poly;
}

int cmd_polytope(const std::string& scenario_path, const std::string& out,
                 double delta, const std::string& horizons_csv,
                 const std::string& format_csv) {
  const Scenario scenario = load_scenario(scenario_path);
  const std::set<std::string> formats = parse_formats(format_csv);
  std::vector<double> horizons = {scenario.t_h};
  if (!horizons_csv.empty())
    horizons = parse_double_list(horizons_csv, "--horizons");

  const std::filesystem::path out_dir(out);
  std::filesystem::create_directories(out_dir);

  bool all_produced = true;
  for (double t_h : horizons) {
    if (!(t_h > 0.0))
      throw std::runtime_error("--horizons: entries must be positive");
    double seconds = 0.0;
    const Polytope poly = solve_scenario(scenario, t_h, delta, &seconds);
    const std::string stem =
        horizons.size() == 1 ? "polytope" : "polytope_" + format_horizon(t_h);

    if (poly.empty()) {
      std::cout << "t_h " << format_horizon(t_h) << ": empty reachable set\n";
      write_text_file(out_dir / (stem + ".json"), export_json(poly));
      all_produced = false;
      continue;
    }
    write_polytope_files(poly, out_dir, stem, formats);
    std::cout << "t_h " << format_horizon(t_h) << ": " << poly.vertices.size()
              << " vertices, " << poly.faces.size() << " faces, volume "
              << volume(poly) << " m^3, " << seconds * 1000.0 << " ms\n";
  }
  return all_produced ? 0 : kExitEmptyResult;
}

int cmd_links(const std::string& scenario_path, const std::string& out,
              double delta, const std::string& format_csv) {
  const Scenario scenario = load_scenario(scenario_path);
  if (scenario.links.empty())
    throw std::runtime_error("scenario has no link envelopes");
  const std::set<std::string> formats = parse_formats(format_csv);
  const std::filesystem::path out_dir(out);
  std::filesystem::create_directories(out_dir);

  std::string scene;
  int vertex_offset = 0;
  bool all_produced = true;
  for (std::size_t i = 0; i < scenario.links.size(); ++i) {
    std::vector<std::string> warnings;
    const Polytope poly =
        link_reachable(scenario.model, scenario.state, scenario.links[i],
                       {scenario.t_h}, delta, &warnings);
    for (const std::string& w : warnings) std::cout << "link " << i << ": " << w << "\n";

    const std::string stem = "link_" + std::to_string(i);
    if (poly.empty()) {
      std::cout << stem << ": empty reachable set\n";
      write_text_file(out_dir / (stem + ".json"), export_json(poly));
      all_produced = false;
      continue;
    }
    const MeshOutcome outcome = write_polytope_files(poly, out_dir, stem, formats);
    if (outcome.obj_written && poly.dim == 3)
      append_scene_object(scene, poly, stem, vertex_offset);
    std::cout << stem << ": " << poly.vertices.size() << " vertices, volume "
              << volume(poly) << " m^3\n";
  }

  if (formats.count("obj") && !scene.empty())
    write_text_file(out_dir / "scene.obj", scene);
  return all_produced ? 0 : kExitEmptyResult;
}

int cmd_benchmark(const std::string& robot_path, const std::string& out,
                  const BenchmarkOptions& options) {
  const RobotModel model = load_robot(robot_path);
  const BenchmarkResult result = run_benchmark(model, options);

  const std::filesystem::path out_dir(out);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "benchmark.csv", result.csv);

  for (const std::string& w : result.warnings) std::cout << "warning: " << w << "\n";
  if (!result.warnings.empty())
    std::cout << result.warnings.size() << " (config, horizon) pairs skipped\n";

  std::cout << "t_h      rows  m1 (mean/std)      m2 (mean/std)      "
               "m3 (mean/std)      vol_Px      vol_Cx\n";
  for (const HorizonSummary& s : result.summary) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-8g %-5d %.4f / %.4f    %.4f / %.4f    %.4f / %.4f    %-11.5g %-.5g\n",
                  s.t_h, s.rows, s.mean_m1, s.std_m1, s.mean_m2, s.std_m2,
                  s.mean_m3, s.std_m3, s.mean_vol_Px, s.mean_vol_Cx);
    std::cout << line;
  }
  std::cout << "wrote " << (out_dir / "benchmark.csv").string() << " ("
            << result.rows.size() << " rows)\n";
  return result.rows.empty() ? kExitEmptyResult : 0;
}

int cmd_timing(const std::string& robot_path, const std::string& out,
               const std::vector<double>& horizons, int configs,
               const std::vector<int>& env_rows, std::uint64_t seed,
               double delta) {
  const RobotModel model = load_robot(robot_path);
  const TimingResult result =
      timing_run(model, horizons, configs, env_rows, seed, delta);

  const std::filesystem::path out_dir(out);
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "timing.csv", result.csv);

  std::cout << "t_h      env_rows  samples  mean_ms     std_ms\n";
  for (const TimingCell& cell : result.cells) {
    char line[160];
    std::snprintf(line, sizeof line, "%-8g %-9d %-8d %-11.3f %-.3f\n", cell.t_h,
                  cell.env_rows, cell.samples, cell.mean_ms, cell.std_ms);
    std::cout << line;
  }
  std::cout << "wrote " << (out_dir / "timing.csv").string() << "\n";
  return result.cells.empty() ? kExitEmptyResult : 0;
}

void print_model_info(const RobotModel& model) {
  std::cout << "robot: " << model.name << "\n";
  std::cout << "dof: " << model.dof() << "\n";
  std::cout << "gravity: [" << model.gravity.transpose() << "]\n";
  std::cout << "joint  q range            qd range          tau range\n";
  for (int j = 0; j < model.dof(); ++j) {
    const JointSpec& joint = model.joints[static_cast<std::size_t>(j)];
    char line[200];
    std::snprintf(line, sizeof line,
                  "%-6d [%7.3f, %7.3f]  [%6.2f, %6.2f]  [%8.2f, %8.2f]\n", j,
                  joint.q_min, joint.q_max, joint.qd_min, joint.qd_max,
                  joint.tau_min, joint.tau_max);
    std::cout << line;
  }
}

int cmd_info(const std::string& scenario_path, const std::string& robot_path) {
  if (scenario_path.empty() && robot_path.empty())
    throw std::runtime_error("info needs --scenario or --robot");
  if (!scenario_path.empty()) {
    const Scenario scenario = load_scenario(scenario_path);
    print_model_info(scenario.model);
    std::cout << "t_h: " << scenario.t_h << " s\n";
    std::cout << "frame: " << scenario.frame << ", local point ["
              << scenario.local_point.transpose() << "], task dim "
              << scenario.task_dim << "\n";
    const Eigen::Vector3d x = forward_kinematics(
        scenario.model, scenario.state.q, scenario.frame, scenario.local_point);
    std::cout << "task point at q: [" << x.transpose() << "]\n";
    if (scenario.has_environment)
      std::cout << "environment rows: " << scenario.environment.A_e.rows() << "\n";
    if (!scenario.links.empty())
      std::cout << "link envelopes: " << scenario.links.size() << "\n";
  } else {
    print_model_info(load_robot(robot_path));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reachable-space polytopes for serial manipulators"};
  app.require_subcommand(1);

  std::string scenario_path, robot_path, out = ".";
  double delta = 0.001, dt = 0.005;
  std::string horizons_csv, env_rows_csv = "0,10,100,500,1000";
  std::string format_csv = "obj,json";
  std::uint64_t seed = 42;
  int configs = 20;
  int timing_configs = 5;
  int task_dim = 3;
  int frame = -1;
  std::string local_point_csv;
  int threads = 0;
  bool random_velocities = false, measure_time = false;
  double cart_accel = 0.0, cart_vel = 0.0;

  CLI::App* poly_cmd =
      app.add_subcommand("polytope", "compute the reachable polytope of a scenario");
  poly_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  poly_cmd->add_option("--out", out, "output directory");
  poly_cmd->add_option("--delta", delta, "accuracy in meters")
      ->check(CLI::PositiveNumber);
  poly_cmd->add_option("--horizons", horizons_csv,
                       "comma-separated horizon overrides in seconds");
  poly_cmd->add_option("--format", format_csv, "outputs to write: obj,json");

  CLI::App* links_cmd =
      app.add_subcommand("links", "compute one polytope per link envelope");
  links_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  links_cmd->add_option("--out", out, "output directory");
  links_cmd->add_option("--delta", delta, "accuracy in meters")
      ->check(CLI::PositiveNumber);
  links_cmd->add_option("--format", format_csv, "outputs to write: obj,json");

  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "accuracy sweep over random configurations");
  bench_cmd->add_option("--robot", robot_path, "robot JSON file")->required();
  bench_cmd->add_option("--out", out, "output directory");
  bench_cmd->add_option("--delta", delta, "accuracy in meters")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dt", dt, "simulation step in seconds")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--horizons", horizons_csv, "comma-separated horizons");
  bench_cmd->add_option("--seed", seed, "random seed");
  bench_cmd->add_option("--configs", configs, "number of random configurations")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--task-dim", task_dim, "task-space dimension (2 or 3)");
  bench_cmd->add_option("--frame", frame, "task frame index (default: last joint)");
  bench_cmd->add_option("--local-point", local_point_csv,
                        "task point in the frame, as x,y,z");
  bench_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  bench_cmd->add_flag("--random-velocities", random_velocities,
                      "draw joint velocities uniformly inside their box");
  bench_cmd->add_flag("--measure-time", measure_time,
                      "fill the poly_ms column with measured wall time");
  bench_cmd->add_option("--cart-accel", cart_accel,
                        "symmetric Cartesian acceleration bound for the box baseline");
  bench_cmd->add_option("--cart-vel", cart_vel,
                        "symmetric Cartesian velocity bound for the box baseline");

  CLI::App* timing_cmd =
      app.add_subcommand("timing", "polytope wall-time table over environment sizes");
  timing_cmd->add_option("--robot", robot_path, "robot JSON file")->required();
  timing_cmd->add_option("--out", out, "output directory");
  timing_cmd->add_option("--delta", delta, "accuracy in meters")
      ->check(CLI::PositiveNumber);
  timing_cmd->add_option("--horizons", horizons_csv, "comma-separated horizons");
  timing_cmd->add_option("--seed", seed, "random seed");
  timing_cmd->add_option("--configs", timing_configs, "configurations per cell")
      ->check(CLI::PositiveNumber);
  timing_cmd->add_option("--env-rows", env_rows_csv,
                         "comma-separated environment row counts");

  CLI::App* info_cmd =
      app.add_subcommand("info", "print robot or scenario facts");
  info_cmd->add_option("--scenario", scenario_path, "scenario JSON file");
  info_cmd->add_option("--robot", robot_path, "robot JSON file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (poly_cmd->parsed())
      return cmd_polytope(scenario_path, out, delta, horizons_csv, format_csv);
    if (links_cmd->parsed())
      return cmd_links(scenario_path, out, delta, format_csv);
    if (bench_cmd->parsed()) {
      BenchmarkOptions options;
      options.configs = configs;
      options.seed = seed;
      options.delta = delta;
      options.dt = dt;
      options.task_dim = task_dim;
      options.frame = frame;
      if (!local_point_csv.empty()) {
        const std::vector<double> point =
            parse_double_list(local_point_csv, "--local-point");
        if (point.size() != 3)
          throw std::runtime_error("--local-point: expected x,y,z");
        options.local_point = Eigen::Vector3d(point[0], point[1], point[2]);
      }
      options.threads = threads;
      options.random_velocities = random_velocities;
      options.report_timing = measure_time;
      if (!horizons_csv.empty())
        options.horizons = parse_double_list(horizons_csv, "--horizons");
      if (cart_accel > 0.0 || cart_vel > 0.0) {
        CartesianLimits lim = default_cartesian_limits(task_dim);
        if (cart_accel > 0.0) {
          lim.xdd_min.setConstant(-cart_accel);
          lim.xdd_max.setConstant(cart_accel);
        }
        if (cart_vel > 0.0) {
          lim.xd_min.setConstant(-cart_vel);
          lim.xd_max.setConstant(cart_vel);
        }
        options.cart_limits = lim;
      }
      return cmd_benchmark(robot_path, out, options);
    }
    if (timing_cmd->parsed()) {
      std::vector<double> horizons = {0.05, 0.15, 0.25};
      if (!horizons_csv.empty())
        horizons = parse_double_list(horizons_csv, "--horizons");
      const std::vector<int> env_rows = parse_int_list(env_rows_csv, "--env-rows");
      return cmd_timing(robot_path, out, horizons, timing_configs, env_rows, seed,
                        delta);
    }
    if (info_cmd->parsed()) return cmd_info(scenario_path, robot_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitRuntimeError;
}
