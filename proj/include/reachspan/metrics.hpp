#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "reachspan/polytope.hpp"
#include "reachspan/simulation.hpp"

namespace reachspan {

/// Axis-aligned Cartesian velocity and acceleration bounds, one entry per
/// task-space axis.
struct CartesianLimits {
  Eigen::VectorXd xdd_min;
  Eigen::VectorXd xdd_max;
  Eigen::VectorXd xd_min;
  Eigen::VectorXd xd_max;
};

/// Accuracy summary for one (configuration, horizon) evaluation.
///
/// `m1` is the fraction of simulated points the polytope contains, `m2` the
/// volume fraction of the polytope covered by the hull of its contained
/// points (NaN when the polytope has no volume), and `m3` the ratio of the
/// polytope volume to the hull volume of all simulated points. `vol_R1` and
/// `vol_R2` are those two hull volumes; `vol_Cx` is the volume of the
/// Cartesian-box baseline when one was evaluated. `wall_time_polytope` is in
/// seconds.
struct MetricsReport {
  int config_id = 0;
  std::uint64_t seed = 0;
  double t_h = 0.0;
  int n_vertices = 0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double vol_Px = 0.0;
  double vol_R1 = 0.0;
  double vol_R2 = 0.0;
  double vol_Cx = 0.0;
  double wall_time_polytope = 0.0;
};

/// Fraction of reached points lying inside the polytope within eps.
double metric_m1(const ReachedSet& reached, const Polytope& poly, double eps);

/// Volume of the convex hull of the reached points that fall inside the
/// polytope, divided by the polytope volume. Returns 0 when too few points
/// land inside or their hull is flat, and NaN when the polytope itself has
/// no volume. Clamped to [0, 1].
double metric_m2(const ReachedSet& reached, const Polytope& poly);

/// Polytope volume divided by the volume of the convex hull of all reached
/// points. Throws std::runtime_error when that hull is degenerate.
double metric_m3(const ReachedSet& reached, const Polytope& poly);

/// All three ratios plus the intermediate hull volumes in one pass, so the
/// two point-cloud hulls are built only once. Fills m1, m2, m3, vol_Px,
/// vol_R1, vol_R2 and n_vertices; identification fields are left to the
/// caller.
MetricsReport evaluate_metrics(const ReachedSet& reached, const Polytope& poly,
                               double eps);

/// Convex hull of a point cloud given as matrix columns, processed in chunks
/// so the hull never sees more than a few thousand candidate points at once.
Polytope hull_of_columns(const Eigen::MatrixXd& points);

/// Axis-aligned box reachable under per-axis constant-acceleration motion
/// x' = xdd t_h^2/2 + xd_k t_h + x_k, with the acceleration interval cut
/// down so the velocity bounds hold over the horizon. By default the
/// velocity rows bound the velocity gain xdd t_h; with
/// `bound_final_velocity` they bound the end-of-horizon velocity
/// xd_k + xdd t_h instead. Throws when the bounds leave no admissible
/// acceleration on some axis.
Polytope cube_baseline(const Eigen::VectorXd& x_k, const Eigen::VectorXd& xd_k,
                       const CartesianLimits& limits, double t_h,
                       bool bound_final_velocity = false);

}  // namespace reachspan
