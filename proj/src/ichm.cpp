#include "reachspan/ichm.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "reachspan/convex_hull.hpp"
#include "reachspan/linprog.hpp"

namespace reachspan {

namespace {

constexpr int kMaxInserts = 500000;

std::uint64_t splitmix_next(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t& s) {
  return static_cast<double>(splitmix_next(s) >> 11) * 0x1.0p-53;
}

Eigen::VectorXd gaussian_vector(int m, std::uint64_t& s) {
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; i += 2) {
    const double u1 = std::max(unit_double(s), 1e-300);
    const double u2 = unit_double(s);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < m) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  return v;
}

// Running orthonormal basis of the affine flat spanned by the support points
// seen so far. Axis-aligned support directions alone often return only two
// opposite corners of a skewed projection, so the seeder asks this tracker
// for directions orthogonal to everything found yet; probing such a
// direction either produces an affinely independent point or certifies that
// the set is flat along it.
class SpanTracker {
 public:
  // Folds a point in; true when it enlarged the spanned flat.
  bool add(const Eigen::VectorXd& p) {
    if (!has_origin_) {
      origin_ = p;
      has_origin_ = true;
      return false;
    }
    Eigen::VectorXd d = p - origin_;
    scale_ = std::max(scale_, d.norm());
    project_out(basis_, d);
    project_out(flats_, d);
    if (d.norm() <= tolerance()) return false;
    basis_.push_back(d.normalized());
    return true;
  }

  // Marks `w` as a direction the set has been certified flat along.
  void mark_flat(const Eigen::VectorXd& w) { flats_.push_back(w); }

  int rank() const { return static_cast<int>(basis_.size()); }
  int undecided(int m) const {
    return m - rank() - static_cast<int>(flats_.size());
  }
  const Eigen::VectorXd& origin() const { return origin_; }
  double tolerance() const {
    return 1e-9 * scale_ + 1e-13 * (1.0 + (has_origin_ ? origin_.norm() : 0.0));
  }

  // Unit direction orthogonal to both the spanned flat and all certified
  // flat directions; zero vector when no such direction remains.
  Eigen::VectorXd orthogonal_direction(int m, std::uint64_t& s) const {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Eigen::VectorXd v = gaussian_vector(m, s);
      project_out(basis_, v);
      project_out(flats_, v);
      project_out(basis_, v);
      project_out(flats_, v);
      if (v.norm() > 1e-6) return v / v.norm();
    }
    return Eigen::VectorXd::Zero(m);
  }

 private:
  static void project_out(const std::vector<Eigen::VectorXd>& dirs, Eigen::VectorXd& v) {
    for (const Eigen::VectorXd& b : dirs) v -= b.dot(v) * b;
  }

  Eigen::VectorXd origin_;
  std::vector<Eigen::VectorXd> basis_;
  std::vector<Eigen::VectorXd> flats_;
  bool has_origin_ = false;
  double scale_ = 0.0;
};

Polytope empty_polytope(int m, double delta) {
  Polytope p;
  p.dim = m;
  p.affine_dim = -1;
  p.tolerance = delta;
  return p;
}

// Fallback for seed sets that span less than the task dimension: hull the
// support points directly and match torque witnesses back to the surviving
// vertices.
Polytope degenerate_polytope(const std::vector<Eigen::VectorXd>& pts,
                             const std::vector<Eigen::VectorXd>& taus,
                             const Eigen::VectorXd& x_star, double delta) {
  std::vector<Eigen::VectorXd> shifted(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) shifted[k] = pts[k] + x_star;
  Polytope poly = convex_hull(shifted);
  poly.tolerance = delta;
  poly.generators.reserve(poly.vertices.size());
  for (const Eigen::VectorXd& v : poly.vertices) {
    int best = 0;
    double best_d2 = (shifted[0] - v).squaredNorm();
    for (std::size_t k = 1; k < shifted.size(); ++k) {
      const double d2 = (shifted[k] - v).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(k);
      }
    }
    poly.generators.push_back(taus[best]);
  }
  return poly;
}

struct SupportProbe {
  const Eigen::MatrixXd& P;
  SupportSolver& solver;
  bool feasible = true;

  // Maximizes dir'P tau; returns false when the whole problem is infeasible.
  bool probe(const Eigen::VectorXd& dir, Eigen::VectorXd& tau_out) {
    const LpResult r = solver.maximize(P.transpose() * dir);
    if (r.status != LpStatus::Optimal) {
      feasible = false;
      return false;
    }
    tau_out = r.x;
    return true;
  }
};

Polytope enumerate3(const Eigen::MatrixXd& P, const Eigen::VectorXd& x_star,
                    SupportProbe& probe, std::vector<Eigen::VectorXd>&& seed_pts,
                    std::vector<Eigen::VectorXd>&& taus, double delta) {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const Eigen::VectorXd& p : seed_pts) center += p;
  center /= static_cast<double>(seed_pts.size());

  std::vector<Eigen::Vector3d> centered(seed_pts.size());
  for (std::size_t k = 0; k < seed_pts.size(); ++k)
    centered[k] = Eigen::Vector3d(seed_pts[k]) - center;

  Hull3Builder hull;
  if (!hull.seed(centered))
    return degenerate_polytope(seed_pts, taus, x_star, delta);
  for (int pid = 0; pid < static_cast<int>(centered.size()); ++pid)
    hull.insert_id(pid, -1, nullptr, true);

  std::vector<Eigen::VectorXd> face_tau(hull.face_count());
  std::vector<Eigen::Vector3d> face_pt(hull.face_count());
  std::priority_queue<std::pair<double, int>> heap;

  auto eval_face = [&](int fid) {
    const Hull3Builder::Face& f = hull.face(fid);
    if (!f.alive) return;
    Eigen::VectorXd tau;
    if (!probe.probe(f.n, tau)) return;
    const Eigen::Vector3d p = Eigen::Vector3d(P * tau) - center;
    double d_face = f.n.dot(hull.points()[f.v[0]]);
    d_face = std::max(d_face, f.n.dot(hull.points()[f.v[1]]));
    d_face = std::max(d_face, f.n.dot(hull.points()[f.v[2]]));
    const double violation = f.n.dot(p) - d_face;
    if (violation > delta) {
      face_tau[fid] = std::move(tau);
      face_pt[fid] = p;
      heap.emplace(violation, fid);
    }
  };

  for (int fid = 0; fid < hull.face_count(); ++fid) eval_face(fid);

  int inserts = 0;
  while (!heap.empty()) {
    const int fid = heap.top().second;
    heap.pop();
    if (!hull.face(fid).alive) continue;
    if (++inserts > kMaxInserts)
      throw std::runtime_error("ichm: refinement did not converge within " +
                               std::to_string(kMaxInserts) + " insertions");
    const std::vector<int> created = hull.insert(face_pt[fid], fid, nullptr);
    taus.push_back(face_tau[fid]);
    face_tau.resize(hull.face_count());
    face_pt.resize(hull.face_count());
    for (const int g : created) eval_face(g);
  }

  const std::vector<int> live = hull.live_vertices();
  const Eigen::Vector3d shift = center + Eigen::Vector3d(x_star);
  std::vector<int> remap(hull.points().size(), -1);

  Polytope poly;
  poly.dim = 3;
  poly.affine_dim = 3;
  poly.tolerance = delta;
  poly.vertices.reserve(live.size());
  poly.generators.reserve(live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    remap[live[k]] = static_cast<int>(k);
    poly.vertices.push_back(Eigen::VectorXd(hull.points()[live[k]] + shift));
    poly.generators.push_back(taus[live[k]]);
  }
  int n_live = 0;
  for (int f = 0; f < hull.face_count(); ++f)
    if (hull.face(f).alive) ++n_live;
  poly.faces.reserve(n_live);
  poly.H.resize(n_live, 3);
  poly.d.resize(n_live);
  int row = 0;
  for (int f = 0; f < hull.face_count(); ++f) {
    const Hull3Builder::Face& face = hull.face(f);
    if (!face.alive) continue;
    poly.faces.push_back({remap[face.v[0]], remap[face.v[1]], remap[face.v[2]]});
    poly.H.row(row) = face.n.transpose();
    poly.d[row] = face.d + face.n.dot(shift);
    ++row;
  }
  return poly;
}

Polytope enumerate2(const Eigen::MatrixXd& P, const Eigen::VectorXd& x_star,
                    SupportProbe& probe, std::vector<Eigen::VectorXd>&& seed_pts,
                    std::vector<Eigen::VectorXd>&& taus, double delta) {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (const Eigen::VectorXd& p : seed_pts) center += p;
  center /= static_cast<double>(seed_pts.size());

  std::vector<Eigen::Vector2d> centered(seed_pts.size());
  for (std::size_t k = 0; k < seed_pts.size(); ++k)
    centered[k] = Eigen::Vector2d(seed_pts[k]) - center;

  Hull2Builder hull;
  if (!hull.seed(centered))
    return degenerate_polytope(seed_pts, taus, x_star, delta);

  std::vector<Eigen::VectorXd> face_tau(hull.face_count());
  std::vector<Eigen::Vector2d> face_pt(hull.face_count());
  std::priority_queue<std::pair<double, int>> heap;

  auto eval_face = [&](int fid) {
    const Hull2Builder::Edge& e = hull.face(fid);
    if (!e.alive) return;
    Eigen::VectorXd tau;
    if (!probe.probe(e.n, tau)) return;
    const Eigen::Vector2d p = Eigen::Vector2d(P * tau) - center;
    const double d_face =
        std::max(e.n.dot(hull.points()[e.v[0]]), e.n.dot(hull.points()[e.v[1]]));
    const double violation = e.n.dot(p) - d_face;
    if (violation > delta) {
      face_tau[fid] = std::move(tau);
      face_pt[fid] = p;
      heap.emplace(violation, fid);
    }
  };

  for (int fid = 0; fid < hull.face_count(); ++fid) eval_face(fid);

  int inserts = 0;
  while (!heap.empty()) {
    const int fid = heap.top().second;
    heap.pop();
    if (!hull.face(fid).alive) continue;
    if (++inserts > kMaxInserts)
      throw std::runtime_error("ichm: refinement did not converge within " +
                               std::to_string(kMaxInserts) + " insertions");
    const std::vector<int> created = hull.insert(face_pt[fid], fid, nullptr);
    taus.push_back(face_tau[fid]);
    face_tau.resize(hull.face_count());
    face_pt.resize(hull.face_count());
    for (const int g : created) eval_face(g);
  }

  const std::vector<int>& ring = hull.ring();
  const Eigen::Vector2d shift = center + Eigen::Vector2d(x_star);
  const int nv = static_cast<int>(ring.size());

  Polytope poly;
  poly.dim = 2;
  poly.affine_dim = 2;
  poly.tolerance = delta;
  poly.vertices.reserve(nv);
  poly.generators.reserve(nv);
  for (const int id : ring) {
    poly.vertices.push_back(Eigen::VectorXd(hull.points()[id] + shift));
    poly.generators.push_back(taus[id]);
  }
  poly.faces.reserve(nv);
  poly.H.resize(nv, 2);
  poly.d.resize(nv);
  for (int k = 0; k < nv; ++k) {
    poly.faces.push_back({k, (k + 1) % nv});
    const Eigen::Vector2d dir = hull.points()[ring[(k + 1) % nv]] - hull.points()[ring[k]];
    const Eigen::Vector2d n = Eigen::Vector2d(dir.y(), -dir.x()).normalized();
    poly.H.row(k) = n.transpose();
    poly.d[k] = n.dot(hull.points()[ring[k]] + shift);
  }
  return poly;
}

Polytope enumerate_projection(const Eigen::MatrixXd& P, const Eigen::VectorXd& x_star,
                              const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              double delta) {
  const int m = static_cast<int>(P.rows());

  SupportSolver solver(A, b);
  SupportProbe probe{P, solver};

  std::vector<Eigen::VectorXd> pts;
  std::vector<Eigen::VectorXd> taus;
  SpanTracker span;
  auto take = [&](const Eigen::VectorXd& dir) {
    Eigen::VectorXd tau;
    if (!probe.probe(dir, tau)) return false;
    pts.push_back(P * tau);
    taus.push_back(std::move(tau));
    span.add(pts.back());
    return true;
  };

  for (int i = 0; i < m; ++i) {
    for (const double sign : {1.0, -1.0}) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
      dir[i] = sign;
      if (!take(dir)) return empty_polytope(m, delta);
    }
  }

  std::uint64_t rng = 0x6b7a1e53c2d4f809ULL;
  for (int extra = 0; extra < 3 * m && span.rank() < m && span.undecided(m) > 0;) {
    const Eigen::VectorXd w = span.orthogonal_direction(m, rng);
    if (w.squaredNorm() == 0.0) break;
    const int before = span.rank();
    if (!take(w)) return empty_polytope(m, delta);
    ++extra;
    if (span.rank() > before) continue;
    if (extra >= 3 * m) break;
    if (!take(-w)) return empty_polytope(m, delta);
    ++extra;
    if (span.rank() == before) span.mark_flat(w);
  }

  if (span.rank() < m) return degenerate_polytope(pts, taus, x_star, delta);

  if (m == 3)
    return enumerate3(P, x_star, probe, std::move(pts), std::move(taus), delta);
  return enumerate2(P, x_star, probe, std::move(pts), std::move(taus), delta);
}

}  // namespace

Polytope ichm(const ProjectionProblem& problem, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("ichm: delta must be positive and finite, got " +
                                std::to_string(delta));
  const int m = static_cast<int>(problem.P.rows());
  const int n = static_cast<int>(problem.P.cols());
  if (m != 2 && m != 3)
    throw std::invalid_argument("ichm: projection must map into 2 or 3 dimensions, got " +
                                std::to_string(m));
  if (n < 1 || problem.A.cols() != n || problem.A.rows() != problem.b.size() ||
      problem.x_star.size() != m)
    throw std::invalid_argument("ichm: inconsistent problem dimensions");
  if (!problem.P.allFinite() || !problem.A.allFinite() || !problem.b.allFinite() ||
      !problem.x_star.allFinite())
    throw std::invalid_argument("ichm: non-finite problem data");

  const int rows = static_cast<int>(problem.A.rows());
  const int n_env = rows - problem.n_torque_rows;
  if (n_env <= 0 || problem.n_torque_rows <= 0)
    return enumerate_projection(problem.P, problem.x_star, problem.A, problem.b, delta);

  // Environment rows multiply the cost of every support LP, so screen them
  // against the actuation-only polytope first. A row whose offset exceeds
  // the polytope's support in that direction by more than the enumeration
  // error cannot cut the reachable set and is dropped before the clipped
  // enumeration. The error bound maps delta back into row units through the
  // smallest singular value of P, which keeps the screen conservative for
  // rows of any scale.
  Polytope base =
      enumerate_projection(problem.P, problem.x_star,
                           problem.A.topRows(problem.n_torque_rows),
                           problem.b.head(problem.n_torque_rows), delta);
  if (base.empty()) return base;
  if (base.generators.empty())
    return enumerate_projection(problem.P, problem.x_star, problem.A, problem.b,
                                delta);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.P);
  const double sigma_min = svd.singularValues().minCoeff();
  std::vector<int> kept;
  for (int j = problem.n_torque_rows; j < rows; ++j) {
    const Eigen::VectorXd r = problem.A.row(j).transpose();
    double support = -std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& tau : base.generators)
      support = std::max(support, r.dot(tau));
    const double buffer =
        sigma_min > 0.0 ? delta * r.norm() / sigma_min
                        : std::numeric_limits<double>::infinity();
    const double guard = 1e-9 * (1.0 + std::abs(problem.b[j]));
    if (!(support + buffer + guard <= problem.b[j])) kept.push_back(j);
  }
  if (kept.empty()) return base;

  Eigen::MatrixXd A2(problem.n_torque_rows + static_cast<int>(kept.size()), n);
  Eigen::VectorXd b2(A2.rows());
  A2.topRows(problem.n_torque_rows) = problem.A.topRows(problem.n_torque_rows);
  b2.head(problem.n_torque_rows) = problem.b.head(problem.n_torque_rows);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    A2.row(problem.n_torque_rows + static_cast<int>(k)) = problem.A.row(kept[k]);
    b2[problem.n_torque_rows + static_cast<int>(k)] = problem.b[kept[k]];
  }
  return enumerate_projection(problem.P, problem.x_star, A2, b2, delta);
}

Polytope link_reachable(const RobotModel& model, const RobotState& state,
                        const LinkEnvelope& envelope, const HorizonSpec& horizon,
                        double delta, std::vector<std::string>* warnings) {
  const std::size_t min_anchors = envelope.kind == LinkEnvelope::Kind::Segment ? 2 : 1;
  if (envelope.anchors.size() < min_anchors)
    throw std::invalid_argument("link_reachable: envelope needs at least " +
                                std::to_string(min_anchors) + " anchor points, got " +
                                std::to_string(envelope.anchors.size()));

  std::vector<Polytope> parts;
  parts.reserve(envelope.anchors.size());
  for (std::size_t k = 0; k < envelope.anchors.size(); ++k) {
    const LinkEnvelope::Anchor& a = envelope.anchors[k];
    const ProjectionProblem pr =
        build_projection(model, state, horizon, a.frame, a.local_point);
    Polytope poly = ichm(pr, delta);
    if (poly.empty()) {
      if (warnings)
        warnings->push_back("link anchor " + std::to_string(k) + " (frame " +
                            std::to_string(a.frame) +
                            ") has no feasible torque; skipped");
      continue;
    }
    parts.push_back(std::move(poly));
  }
  if (parts.empty()) return empty_polytope(3, delta);

  Polytope out = hull_union(parts);
  out.tolerance = delta;
  return out;
}

}  // namespace reachspan
