#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace reachspan {

/// Convex polytope in 2 or 3 dimensions, carried in both representations.
///
/// `vertices` is the irredundant vertex list. `faces` holds index triples
/// (dim 3) or ring edges as index pairs in counter-clockwise order (dim 2).
/// `H`/`d` give the half-space form H x <= d. `affine_dim` is the dimension
/// actually spanned by the vertices: equal to `dim` for a solid body, lower
/// for flat or degenerate sets, and -1 for an empty polytope. `tolerance`
/// records the accuracy parameter the polytope was built with.
///
/// `generators`, when present, carries one torque vector per vertex: the
/// joint torque whose horizon prediction lands on that vertex.
struct Polytope {
  int dim = 0;
  int affine_dim = -1;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<std::vector<int>> faces;
  Eigen::MatrixXd H;
  Eigen::VectorXd d;
  double tolerance = 0.0;
  std::vector<Eigen::VectorXd> generators;

  bool empty() const { return affine_dim < 0; }
};

/// True iff H x <= d + eps holds for every half-space row. Empty polytopes
/// contain nothing.
bool contains(const Polytope& poly, const Eigen::VectorXd& point, double eps);

/// Containment test for a batch of points (columns of `points`). Returns one
/// flag per column.
std::vector<char> contains_many(const Polytope& poly, const Eigen::MatrixXd& points,
                                double eps);

/// Enclosed volume (area for dim 2). Zero whenever affine_dim < dim.
double volume(const Polytope& poly);

/// Euclidean distance from a point to the polytope, 0 inside. Requires a
/// full-dimensional polytope.
double distance(const Polytope& poly, const Eigen::VectorXd& point);

/// Convex hull of all vertices of all inputs. Vertex sets are pooled and
/// sorted before hulling so the result does not depend on input order.
/// Generators are dropped.
Polytope hull_union(const std::vector<Polytope>& polys);

/// Wavefront OBJ text for a solid 3D polytope (triangulated faces, 1-based
/// indices). Throws for degenerate or non-3D polytopes.
std::string export_obj(const Polytope& poly);

/// JSON text with vertices, faces, half-spaces, volume and tolerance.
/// Numbers survive a round trip through import_polytope_json bitwise.
std::string export_json(const Polytope& poly);

/// Serialize in the requested format: "obj" or "json".
std::string export_mesh(const Polytope& poly, const std::string& format);

/// Rebuild a polytope from export_json output.
Polytope import_polytope_json(const std::string& text);

}  // namespace reachspan
