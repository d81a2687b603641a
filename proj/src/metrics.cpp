#include "reachspan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachspan/convex_hull.hpp"

namespace reachspan {

namespace {

constexpr Eigen::Index kHullChunk = 8192;

double boundary_slack(const Polytope& poly) {
  double scale = 1.0;
  if (poly.d.size() > 0) scale += poly.d.cwiseAbs().maxCoeff();
  return 1e-9 * scale;
}

std::size_t count_true(const std::vector<char>& flags) {
  std::size_t hits = 0;
  for (char f : flags) hits += (f != 0);
  return hits;
}

double contained_hull_volume(const ReachedSet& reached, const Polytope& poly,
                             const std::vector<char>& inside) {
  const std::size_t hits = count_true(inside);
  if (hits < static_cast<std::size_t>(poly.dim) + 1) return 0.0;
  Eigen::MatrixXd pts(reached.points.rows(), static_cast<Eigen::Index>(hits));
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < reached.points.cols(); ++c)
    if (inside[static_cast<std::size_t>(c)]) pts.col(out++) = reached.points.col(c);
  return volume(hull_of_columns(pts));
}

}  // namespace

Polytope hull_of_columns(const Eigen::MatrixXd& points) {
  if (points.cols() == 0)
    throw std::invalid_argument("hull_of_columns: point cloud is empty");
  Polytope hull;
  std::vector<Eigen::VectorXd> pool;
  for (Eigen::Index start = 0; start < points.cols(); start += kHullChunk) {
    const Eigen::Index stop = std::min(points.cols(), start + kHullChunk);
    pool.clear();
    pool.reserve(hull.vertices.size() + static_cast<std::size_t>(stop - start));
    pool.insert(pool.end(), hull.vertices.begin(), hull.vertices.end());
    for (Eigen::Index c = start; c < stop; ++c) pool.push_back(points.col(c));
    hull = convex_hull(pool);
  }
  return hull;
}

double metric_m1(const ReachedSet& reached, const Polytope& poly, double eps) {
  if (reached.points.cols() == 0)
    throw std::invalid_argument("metric_m1: reached set is empty");
  const std::vector<char> inside = contains_many(poly, reached.points, eps);
  return static_cast<double>(count_true(inside)) /
         static_cast<double>(inside.size());
}

double metric_m2(const ReachedSet& reached, const Polytope& poly) {
  if (reached.points.cols() == 0)
    throw std::invalid_argument("metric_m2: reached set is empty");
  const double vol_poly = volume(poly);
  if (!(vol_poly > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<char> inside =
      contains_many(poly, reached.points, boundary_slack(poly));
  const double vol_r1 = contained_hull_volume(reached, poly, inside);
  return std::clamp(vol_r1 / vol_poly, 0.0, 1.0);
}

double metric_m3(const ReachedSet& reached, const Polytope& poly) {
  if (reached.points.cols() == 0)
    throw std::invalid_argument("metric_m3: reached set is empty");
  const Polytope r2 = hull_of_columns(reached.points);
  const double vol_r2 = volume(r2);
  if (!(vol_r2 > 0.0))
    throw std::runtime_error(
        "metric_m3: the hull of the reached points is degenerate");
  return volume(poly) / vol_r2;
}

MetricsReport evaluate_metrics(const ReachedSet& reached, const Polytope& poly,
                               double eps) {
  if (reached.points.cols() == 0)
    throw std::invalid_argument("evaluate_metrics: reached set is empty");

  MetricsReport report;
  report.n_vertices = static_cast<int>(poly.vertices.size());
  report.vol_Px = volume(poly);

  const std::vector<char> inside = contains_many(poly, reached.points, eps);
  report.m1 = static_cast<double>(count_true(inside)) /
              static_cast<double>(inside.size());

  const std::vector<char> strict =
      contains_many(poly, reached.points, boundary_slack(poly));
  report.vol_R1 = contained_hull_volume(reached, poly, strict);
  report.m2 = report.vol_Px > 0.0
                  ? std::clamp(report.vol_R1 / report.vol_Px, 0.0, 1.0)
                  : std::numeric_limits<double>::quiet_NaN();

  const Polytope r2 = hull_of_columns(reached.points);
  report.vol_R2 = volume(r2);
  if (!(report.vol_R2 > 0.0))
    throw std::runtime_error(
        "evaluate_metrics: the hull of the reached points is degenerate");
  report.m3 = report.vol_Px / report.vol_R2;
  return report;
}

Polytope cube_baseline(const Eigen::VectorXd& x_k, const Eigen::VectorXd& xd_k,
                       const CartesianLimits& limits, double t_h,
                       bool bound_final_velocity) {
  const Eigen::Index m = x_k.size();
  if (m < 2 || m > 3)
    throw std::invalid_argument("cube_baseline: x_k must have 2 or 3 entries");
  if (!(t_h > 0.0) || !std::isfinite(t_h))
    throw std::invalid_argument("cube_baseline: horizon must be positive and finite");

  auto check = [m](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != m || !v.allFinite())
      throw std::invalid_argument(std::string("cube_baseline: ") + name +
                                  " must hold one finite entry per axis");
  };
  check(xd_k, "xd_k");
  check(limits.xdd_min, "xdd_min");
  check(limits.xdd_max, "xdd_max");
  check(limits.xd_min, "xd_min");
  check(limits.xd_max, "xd_max");
  if (!x_k.allFinite())
    throw std::invalid_argument("cube_baseline: x_k must be finite");

  Eigen::VectorXd lo(m), hi(m);
  const double half_t2 = 0.5 * t_h * t_h;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v_ref = bound_final_velocity ? xd_k[i] : 0.0;
    const double a_lo = std::max(limits.xdd_min[i], (limits.xd_min[i] - v_ref) / t_h);
    const double a_hi = std::min(limits.xdd_max[i], (limits.xd_max[i] - v_ref) / t_h);
    if (a_lo > a_hi)
      throw std::invalid_argument(
          "cube_baseline: no admissible acceleration on axis " +
          std::to_string(i) + " at this horizon");
    const double shift = x_k[i] + xd_k[i] * t_h;
    lo[i] = shift + a_lo * half_t2;
    hi[i] = shift + a_hi * half_t2;
  }

  std::vector<Eigen::VectorXd> corners;
  corners.reserve(std::size_t{1} << m);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Eigen::VectorXd c(m);
    for (Eigen::Index i = 0; i < m; ++i)
      c[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    corners.push_back(std::move(c));
  }
  return convex_hull(corners);
}

}  // namespace reachspan
