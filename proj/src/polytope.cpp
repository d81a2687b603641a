#include "reachspan/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "reachspan/convex_hull.hpp"

namespace reachspan {
namespace {

using nlohmann::json;

double point_segment_dist(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest point on triangle abc to p, via the Voronoi-region case split.
Eigen::Vector3d closest_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                    const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

}  // namespace

bool contains(const Polytope& poly, const Eigen::VectorXd& point, double eps) {
  if (poly.empty()) return false;
  if (point.size() != poly.dim)
    throw std::invalid_argument("contains: point dimension does not match polytope");
  for (Eigen::Index r = 0; r < poly.H.rows(); ++r) {
    if (poly.H.row(r).dot(point) > poly.d[r] + eps) return false;
  }
  return true;
}

std::vector<char> contains_many(const Polytope& poly, const Eigen::MatrixXd& points,
                                double eps) {
  const int count = static_cast<int>(points.cols());
  std::vector<char> inside(count, 0);
  if (poly.empty()) return inside;
  if (points.rows() != poly.dim)
    throw std::invalid_argument("contains_many: point dimension does not match polytope");

  constexpr int kChunk = 1024;
  Eigen::MatrixXd slack;
  for (int base = 0; base < count; base += kChunk) {
    const int width = std::min(kChunk, count - base);
    slack.noalias() = poly.H * points.middleCols(base, width);
    for (int c = 0; c < width; ++c) {
      inside[base + c] = ((slack.col(c) - poly.d).array() <= eps).all() ? 1 : 0;
    }
  }
  return inside;
}

double volume(const Polytope& poly) {
  if (poly.empty() || poly.affine_dim < poly.dim) return 0.0;
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(poly.dim);
  for (const auto& v : poly.vertices) c0 += v;
  c0 /= static_cast<double>(poly.vertices.size());

  double vol = 0.0;
  if (poly.dim == 3) {
    const Eigen::Vector3d s(c0);
    for (const auto& f : poly.faces) {
      const Eigen::Vector3d a = Eigen::Vector3d(poly.vertices[f[0]]) - s;
      const Eigen::Vector3d b = Eigen::Vector3d(poly.vertices[f[1]]) - s;
      const Eigen::Vector3d c = Eigen::Vector3d(poly.vertices[f[2]]) - s;
      vol += a.dot(b.cross(c)) / 6.0;
    }
  } else {
    const Eigen::Vector2d s(c0);
    for (const auto& f : poly.faces) {
      const Eigen::Vector2d a = Eigen::Vector2d(poly.vertices[f[0]]) - s;
      const Eigen::Vector2d b = Eigen::Vector2d(poly.vertices[f[1]]) - s;
      vol += (a.x() * b.y() - a.y() * b.x()) / 2.0;
    }
  }
  return vol;
}

double distance(const Polytope& poly, const Eigen::VectorXd& point) {
  if (poly.empty()) throw std::invalid_argument("distance: empty polytope");
  if (poly.affine_dim < poly.dim)
    throw std::invalid_argument("distance: polytope is not full-dimensional");
  if (contains(poly, point, 0.0)) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  if (poly.dim == 3) {
    const Eigen::Vector3d p(point);
    for (const auto& f : poly.faces) {
      const Eigen::Vector3d q = closest_on_triangle(p, Eigen::Vector3d(poly.vertices[f[0]]),
                                                    Eigen::Vector3d(poly.vertices[f[1]]),
                                                    Eigen::Vector3d(poly.vertices[f[2]]));
      best = std::min(best, (p - q).norm());
    }
  } else {
    const Eigen::Vector2d p(point);
    for (const auto& f : poly.faces) {
      best = std::min(best, point_segment_dist(p, Eigen::Vector2d(poly.vertices[f[0]]),
                                               Eigen::Vector2d(poly.vertices[f[1]])));
    }
  }
  return best;
}

Polytope hull_union(const std::vector<Polytope>& polys) {
  if (polys.empty()) throw std::invalid_argument("hull_union: no polytopes given");
  int dim = 0;
  double tol = 0.0;
  std::vector<Eigen::VectorXd> pool;
  for (const auto& poly : polys) {
    if (poly.empty()) continue;
    if (dim == 0) dim = poly.dim;
    if (poly.dim != dim)
      throw std::invalid_argument("hull_union: mixed polytope dimensions");
    tol = std::max(tol, poly.tolerance);
    pool.insert(pool.end(), poly.vertices.begin(), poly.vertices.end());
  }
  if (pool.empty()) {
    Polytope out;
    out.dim = polys.front().dim;
    return out;
  }
  std::sort(pool.begin(), pool.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) return a[k] < b[k];
    }
    return false;
  });
  pool.erase(std::unique(pool.begin(), pool.end(),
                         [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                           return a == b;
                         }),
             pool.end());
  Polytope out = convex_hull(pool);
  out.tolerance = std::max(out.tolerance, tol);
  return out;
}

std::string export_obj(const Polytope& poly) {
  if (poly.dim != 3 || poly.affine_dim != 3)
    throw std::invalid_argument("export_obj: requires a solid 3D polytope");
  std::string out;
  out.reserve(poly.vertices.size() * 48 + poly.faces.size() * 24);
  char line[128];
  for (const auto& v : poly.vertices) {
    std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    out += line;
  }
  for (const auto& f : poly.faces) {
    std::snprintf(line, sizeof(line), "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += line;
  }
  return out;
}

std::string export_json(const Polytope& poly) {
  json j;
  j["dim"] = poly.dim;
  j["affine_dim"] = poly.affine_dim;
  j["tolerance"] = poly.tolerance;
  j["volume"] = volume(poly);
  j["vertices"] = json::array();
  for (const auto& v : poly.vertices) j["vertices"].push_back(vector_to_json(v));
  j["faces"] = poly.faces;
  j["H"] = json::array();
  for (Eigen::Index r = 0; r < poly.H.rows(); ++r)
    j["H"].push_back(vector_to_json(poly.H.row(r).transpose()));
  j["d"] = vector_to_json(poly.d);
  if (!poly.generators.empty()) {
    j["generators"] = json::array();
    for (const auto& g : poly.generators) j["generators"].push_back(vector_to_json(g));
  }
  return j.dump(2);
}

std::string export_mesh(const Polytope& poly, const std::string& format) {
  if (format == "obj") return export_obj(poly);
  if (format == "json") return export_json(poly);
  throw std::invalid_argument("export_mesh: unknown format '" + format + "'");
}

Polytope import_polytope_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("polytope JSON parse failed: ") + err.what());
  }
  Polytope poly;
  poly.dim = j.at("dim").get<int>();
  poly.affine_dim = j.at("affine_dim").get<int>();
  poly.tolerance = j.at("tolerance").get<double>();
  for (const auto& v : j.at("vertices")) poly.vertices.push_back(vector_from_json(v));
  poly.faces = j.at("faces").get<std::vector<std::vector<int>>>();
  const auto& rows = j.at("H");
  poly.H.resize(rows.size(), poly.dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    poly.H.row(r) = vector_from_json(rows[r]).transpose();
  poly.d = vector_from_json(j.at("d"));
  if (j.contains("generators")) {
    for (const auto& g : j["generators"]) poly.generators.push_back(vector_from_json(g));
  }
  return poly;
}

}  // namespace reachspan
