#include "reachspan/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace reachspan {
namespace {

constexpr double kEpsScale = 1e-12;

double point_line_dist(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                       const Eigen::Vector3d& u) {
  const Eigen::Vector3d r = p - a;
  return (r - u.dot(r) * u).norm();
}

struct Frame3 {
  int rank = 0;
  std::array<int, 4> id{0, 0, 0, 0};
};

// Greedy affinely independent subset: an extreme pair, then the point
// furthest from their line, then the point furthest from their plane.
// Stops early (lower rank) when the best candidate is within eps.
Frame3 affine_frame3(const std::vector<Eigen::Vector3d>& pts, double eps) {
  const int n = static_cast<int>(pts.size());
  Frame3 fr;
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int axis = 0; axis < 3; ++axis) {
    int lo = 0, hi = 0;
    for (int k = 1; k < n; ++k) {
      if (pts[k][axis] < pts[lo][axis]) lo = k;
      if (pts[k][axis] > pts[hi][axis]) hi = k;
    }
    const double sep = (pts[hi] - pts[lo]).norm();
    if (sep > best) {
      best = sep;
      bi = lo;
      bj = hi;
    }
  }
  fr.id[0] = bi;
  if (best <= eps) return fr;
  fr.rank = 1;
  fr.id[1] = bj;

  const Eigen::Vector3d u = (pts[bj] - pts[bi]).normalized();
  int bk = -1;
  best = eps;
  for (int k = 0; k < n; ++k) {
    const double dd = point_line_dist(pts[k], pts[bi], u);
    if (dd > best) {
      best = dd;
      bk = k;
    }
  }
  if (bk < 0) return fr;
  fr.rank = 2;
  fr.id[2] = bk;

  const Eigen::Vector3d nrm = u.cross(pts[bk] - pts[bi]).normalized();
  int bl = -1;
  best = eps;
  for (int k = 0; k < n; ++k) {
    const double dd = std::abs(nrm.dot(pts[k] - pts[bi]));
    if (dd > best) {
      best = dd;
      bl = k;
    }
  }
  if (bl < 0) return fr;
  fr.rank = 3;
  fr.id[3] = bl;
  return fr;
}

struct Frame2 {
  int rank = 0;
  std::array<int, 3> id{0, 0, 0};
};

Frame2 affine_frame2(const std::vector<Eigen::Vector2d>& pts, double eps) {
  const int n = static_cast<int>(pts.size());
  Frame2 fr;
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int axis = 0; axis < 2; ++axis) {
    int lo = 0, hi = 0;
    for (int k = 1; k < n; ++k) {
      if (pts[k][axis] < pts[lo][axis]) lo = k;
      if (pts[k][axis] > pts[hi][axis]) hi = k;
    }
    const double sep = (pts[hi] - pts[lo]).norm();
    if (sep > best) {
      best = sep;
      bi = lo;
      bj = hi;
    }
  }
  fr.id[0] = bi;
  if (best <= eps) return fr;
  fr.rank = 1;
  fr.id[1] = bj;

  const Eigen::Vector2d u = (pts[bj] - pts[bi]).normalized();
  const Eigen::Vector2d w(-u.y(), u.x());
  int bk = -1;
  best = eps;
  for (int k = 0; k < n; ++k) {
    const double dd = std::abs(w.dot(pts[k] - pts[bi]));
    if (dd > best) {
      best = dd;
      bk = k;
    }
  }
  if (bk < 0) return fr;
  fr.rank = 2;
  fr.id[2] = bk;
  return fr;
}

// Andrew's monotone chain over the given arena ids. Returns the hull ring in
// counter-clockwise order starting from the lexicographically smallest point.
std::vector<int> monotone_chain(const std::vector<Eigen::Vector2d>& pts,
                                std::vector<int> ids, double radius) {
  const double eps2 = kEpsScale * radius * radius;
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    if (pts[a].y() != pts[b].y()) return pts[a].y() < pts[b].y();
    return a < b;
  });
  ids.erase(std::unique(ids.begin(), ids.end(),
                        [&](int a, int b) { return pts[a] == pts[b]; }),
            ids.end());
  const int n = static_cast<int>(ids.size());
  if (n <= 2) return ids;

  auto cross = [&](int o, int a, int b) {
    const Eigen::Vector2d oa = pts[a] - pts[o];
    const Eigen::Vector2d ob = pts[b] - pts[o];
    return oa.x() * ob.y() - oa.y() * ob.x();
  };

  std::vector<int> ring(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(ring[k - 2], ring[k - 1], ids[i]) <= eps2) --k;
    ring[k++] = ids[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross(ring[k - 2], ring[k - 1], ids[i]) <= eps2) --k;
    ring[k++] = ids[i];
  }
  ring.resize(k - 1);
  return ring;
}

Eigen::VectorXd lift(const Eigen::Vector3d& v) {
  Eigen::VectorXd out(3);
  out << v.x(), v.y(), v.z();
  return out;
}

Eigen::VectorXd lift(const Eigen::Vector2d& v) {
  Eigen::VectorXd out(2);
  out << v.x(), v.y();
  return out;
}

// A unit vector orthogonal to u (3D).
Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& u) {
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(u[k]) < std::abs(u[axis])) axis = k;
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
  return (e - u.dot(e) * u).normalized();
}

}  // namespace

double Hull3Builder::plane_eps() const { return kEpsScale * radius_; }

int Hull3Builder::new_face(int a, int b, int c, bool allow_flip) {
  const Eigen::Vector3d& pa = pts_[a];
  const Eigen::Vector3d e1 = pts_[b] - pa;
  const Eigen::Vector3d e2 = pts_[c] - pa;
  Eigen::Vector3d n = e1.cross(e2);
  const double nn = n.norm();
  if (nn <= 1e-10 * e1.norm() * e2.norm() || nn == 0.0) return -1;
  n /= nn;
  Face f;
  f.v = {a, b, c};
  f.nb = {-1, -1, -1};
  f.n = n;
  f.d = n.dot(pa);
  f.alive = true;
  if (f.n.dot(interior_) > f.d - plane_eps()) {
    if (!allow_flip) return -1;
    std::swap(f.v[1], f.v[2]);
    f.n = -f.n;
    f.d = -f.d;
    if (f.n.dot(interior_) > f.d - plane_eps()) return -1;
  }
  faces_.push_back(f);
  return static_cast<int>(faces_.size()) - 1;
}

bool Hull3Builder::seed(const std::vector<Eigen::Vector3d>& points) {
  pts_ = points;
  radius_ = 1e-300;
  for (const auto& p : pts_) radius_ = std::max(radius_, p.norm());
  const Frame3 fr = affine_frame3(pts_, plane_eps());
  if (fr.rank < 3) return false;

  interior_ = 0.25 * (pts_[fr.id[0]] + pts_[fr.id[1]] + pts_[fr.id[2]] + pts_[fr.id[3]]);
  const std::array<std::array<int, 3>, 4> tris = {{
      {fr.id[0], fr.id[1], fr.id[2]},
      {fr.id[0], fr.id[1], fr.id[3]},
      {fr.id[0], fr.id[2], fr.id[3]},
      {fr.id[1], fr.id[2], fr.id[3]},
  }};
  std::array<int, 4> fid{};
  for (int k = 0; k < 4; ++k) {
    fid[k] = new_face(tris[k][0], tris[k][1], tris[k][2], true);
    if (fid[k] < 0) return false;
  }
  for (int a = 0; a < 4; ++a) {
    Face& fa = faces_[fid[a]];
    for (int i = 0; i < 3; ++i) {
      const int u = fa.v[i], w = fa.v[(i + 1) % 3];
      for (int b = 0; b < 4; ++b) {
        if (b == a) continue;
        const Face& fb = faces_[fid[b]];
        for (int j = 0; j < 3; ++j) {
          if (fb.v[j] == w && fb.v[(j + 1) % 3] == u) fa.nb[i] = fid[b];
        }
      }
    }
  }
  return true;
}

std::vector<int> Hull3Builder::insert(const Eigen::Vector3d& p, int hint,
                                      std::vector<int>* dead) {
  pts_.push_back(p);
  return insert_id(static_cast<int>(pts_.size()) - 1, hint, dead, true);
}

std::vector<int> Hull3Builder::insert_id(int pid, int hint, std::vector<int>* dead,
                                         bool allow_rebuild) {
  const Eigen::Vector3d p = pts_[pid];
  radius_ = std::max(radius_, p.norm());
  const double eps = plane_eps();

  int start = -1;
  if (hint >= 0 && hint < face_count() && faces_[hint].alive &&
      faces_[hint].n.dot(p) - faces_[hint].d > eps) {
    start = hint;
  } else {
    double best = eps;
    for (int f = 0; f < face_count(); ++f) {
      if (!faces_[f].alive) continue;
      const double viol = faces_[f].n.dot(p) - faces_[f].d;
      if (viol > best) {
        best = viol;
        start = f;
      }
    }
  }
  if (start < 0) return {};

  std::vector<char> visible(faces_.size(), 0);
  std::vector<int> stack{start}, region;
  visible[start] = 1;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    region.push_back(f);
    for (int j = 0; j < 3; ++j) {
      const int g = faces_[f].nb[j];
      if (g < 0 || visible[g] || !faces_[g].alive) continue;
      if (faces_[g].n.dot(p) - faces_[g].d > eps) {
        visible[g] = 1;
        stack.push_back(g);
      }
    }
  }

  struct HorizonEdge {
    int u, w, outer;
  };
  std::vector<HorizonEdge> horizon;
  for (const int f : region) {
    for (int j = 0; j < 3; ++j) {
      const int g = faces_[f].nb[j];
      if (g >= 0 && !visible[g])
        horizon.push_back({faces_[f].v[j], faces_[f].v[(j + 1) % 3], g});
    }
  }

  std::map<int, int> start_of, end_of;
  bool pinched = horizon.empty();
  for (int e = 0; e < static_cast<int>(horizon.size()) && !pinched; ++e) {
    if (!start_of.emplace(horizon[e].u, e).second) pinched = true;
    if (!end_of.emplace(horizon[e].w, e).second) pinched = true;
  }

  std::vector<int> created;
  if (!pinched) {
    std::vector<int> fresh(horizon.size(), -1);
    for (std::size_t e = 0; e < horizon.size() && !pinched; ++e) {
      fresh[e] = new_face(horizon[e].u, horizon[e].w, pid, false);
      if (fresh[e] < 0) pinched = true;
    }
    if (!pinched) {
      for (const int f : region) {
        faces_[f].alive = false;
        if (dead) dead->push_back(f);
      }
      for (std::size_t e = 0; e < horizon.size(); ++e) {
        Face& f = faces_[fresh[e]];
        const int u = horizon[e].u, w = horizon[e].w;
        f.nb[0] = horizon[e].outer;
        f.nb[1] = fresh[start_of.at(w)];
        f.nb[2] = fresh[end_of.at(u)];
        Face& out = faces_[horizon[e].outer];
        for (int j = 0; j < 3; ++j) {
          if (out.v[j] == w && out.v[(j + 1) % 3] == u) out.nb[j] = fresh[e];
        }
        created.push_back(fresh[e]);
      }
      return created;
    }
    for (const int f : fresh)
      if (f >= 0) faces_[f].alive = false;
  }

  if (!allow_rebuild) return {};

  std::vector<int> ids = live_vertices();
  ids.push_back(pid);
  return rebuild_from(ids, dead);
}

std::vector<int> Hull3Builder::rebuild_from(const std::vector<int>& ids,
                                            std::vector<int>* dead) {
  for (int f = 0; f < face_count(); ++f) {
    if (faces_[f].alive) {
      faces_[f].alive = false;
      if (dead) dead->push_back(f);
    }
  }
  std::vector<Eigen::Vector3d> sub;
  sub.reserve(ids.size());
  for (const int id : ids) sub.push_back(pts_[id]);
  const Frame3 fr = affine_frame3(sub, plane_eps());
  if (fr.rank < 3) throw std::runtime_error("convex hull rebuild lost full rank");

  interior_.setZero();
  std::array<int, 4> seed_ids{};
  for (int k = 0; k < 4; ++k) {
    seed_ids[k] = ids[fr.id[k]];
    interior_ += 0.25 * pts_[seed_ids[k]];
  }
  const int base = face_count();
  const std::array<std::array<int, 3>, 4> tris = {{
      {seed_ids[0], seed_ids[1], seed_ids[2]},
      {seed_ids[0], seed_ids[1], seed_ids[3]},
      {seed_ids[0], seed_ids[2], seed_ids[3]},
      {seed_ids[1], seed_ids[2], seed_ids[3]},
  }};
  for (const auto& t : tris) {
    if (new_face(t[0], t[1], t[2], true) < 0)
      throw std::runtime_error("convex hull rebuild produced a degenerate face");
  }
  for (int a = 0; a < 4; ++a) {
    Face& fa = faces_[base + a];
    for (int i = 0; i < 3; ++i) {
      const int u = fa.v[i], w = fa.v[(i + 1) % 3];
      for (int b = 0; b < 4; ++b) {
        if (b == a) continue;
        const Face& fb = faces_[base + b];
        for (int j = 0; j < 3; ++j) {
          if (fb.v[j] == w && fb.v[(j + 1) % 3] == u) fa.nb[i] = base + b;
        }
      }
    }
  }
  for (const int id : ids) {
    if (id == seed_ids[0] || id == seed_ids[1] || id == seed_ids[2] || id == seed_ids[3])
      continue;
    insert_id(id, -1, nullptr, false);
  }
  std::vector<int> created;
  for (int f = base; f < face_count(); ++f)
    if (faces_[f].alive) created.push_back(f);
  return created;
}

std::vector<int> Hull3Builder::live_vertices() const {
  std::vector<int> ids;
  for (const auto& f : faces_) {
    if (!f.alive) continue;
    ids.insert(ids.end(), f.v.begin(), f.v.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double Hull2Builder::plane_eps() const { return kEpsScale * radius_; }

bool Hull2Builder::seed(const std::vector<Eigen::Vector2d>& points) {
  pts_ = points;
  radius_ = 1e-300;
  for (const auto& p : pts_) radius_ = std::max(radius_, p.norm());
  if (affine_frame2(pts_, plane_eps()).rank < 2) return false;
  std::vector<int> ids(pts_.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<int>(k);
  ring_ = monotone_chain(pts_, ids, radius_);
  if (ring_.size() < 3) return false;
  rebuild_ring(nullptr, nullptr);
  return true;
}

std::vector<int> Hull2Builder::insert(const Eigen::Vector2d& p, int /*hint*/,
                                      std::vector<int>* dead) {
  pts_.push_back(p);
  const int pid = static_cast<int>(pts_.size()) - 1;
  radius_ = std::max(radius_, p.norm());
  const double eps = plane_eps();
  double best = eps;
  for (const auto& e : edges_) {
    if (!e.alive) continue;
    best = std::max(best, e.n.dot(p) - e.d);
  }
  if (best <= eps) return {};

  std::vector<int> ids = ring_;
  ids.push_back(pid);
  ring_ = monotone_chain(pts_, ids, radius_);
  std::vector<int> created;
  rebuild_ring(&created, dead);
  return created;
}

void Hull2Builder::rebuild_ring(std::vector<int>* created, std::vector<int>* dead) {
  const int nv = static_cast<int>(ring_.size());
  std::map<std::pair<int, int>, int> next_ids;
  for (int k = 0; k < nv; ++k) {
    const int a = ring_[k], b = ring_[(k + 1) % nv];
    const auto key = std::make_pair(a, b);
    const auto it = edge_ids_.find(key);
    if (it != edge_ids_.end()) {
      next_ids.emplace(key, it->second);
      continue;
    }
    Edge e;
    e.v = {a, b};
    const Eigen::Vector2d dir = pts_[b] - pts_[a];
    e.n = Eigen::Vector2d(dir.y(), -dir.x()).normalized();
    e.d = e.n.dot(pts_[a]);
    e.alive = true;
    edges_.push_back(e);
    const int id = static_cast<int>(edges_.size()) - 1;
    next_ids.emplace(key, id);
    if (created) created->push_back(id);
  }
  for (const auto& [key, id] : edge_ids_) {
    if (next_ids.count(key)) continue;
    edges_[id].alive = false;
    if (dead) dead->push_back(id);
  }
  edge_ids_ = std::move(next_ids);
}

std::vector<int> Hull2Builder::live_vertices() const {
  std::vector<int> ids = ring_;
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

Polytope hull3_full(const std::vector<Eigen::Vector3d>& centered,
                    const Eigen::Vector3d& shift) {
  Hull3Builder b;
  if (!b.seed(centered)) throw std::logic_error("hull3_full needs full-rank input");

  std::vector<std::vector<int>> outside(b.face_count());
  std::vector<int> pending;
  auto assign = [&](int pid, const std::vector<int>& candidates) {
    const double eps = b.plane_eps();
    double best = eps;
    int where = -1;
    for (const int f : candidates) {
      if (!b.face(f).alive) continue;
      const double viol = b.face(f).n.dot(centered[pid]) - b.face(f).d;
      if (viol > best) {
        best = viol;
        where = f;
      }
    }
    if (where >= 0) {
      if (outside[where].empty()) pending.push_back(where);
      outside[where].push_back(pid);
    }
  };

  std::vector<int> initial{0, 1, 2, 3};
  for (int pid = 0; pid < static_cast<int>(centered.size()); ++pid)
    assign(pid, initial);

  while (!pending.empty()) {
    const int f = pending.back();
    pending.pop_back();
    if (!b.face(f).alive || outside[f].empty()) continue;

    double best = b.plane_eps();
    int pid = -1;
    for (const int cand : outside[f]) {
      const double viol = b.face(f).n.dot(centered[cand]) - b.face(f).d;
      if (viol > best) {
        best = viol;
        pid = cand;
      }
    }
    if (pid < 0) {
      outside[f].clear();
      continue;
    }

    std::vector<int> dead;
    const std::vector<int> created = b.insert_id(pid, f, &dead, true);
    outside.resize(b.face_count());
    if (created.empty()) {
      // the point fell within tolerance of the hull; drop it and retry
      auto& set = outside[f];
      set.erase(std::remove(set.begin(), set.end(), pid), set.end());
      if (!set.empty()) pending.push_back(f);
      continue;
    }
    std::vector<int> orphans;
    for (const int g : dead) {
      orphans.insert(orphans.end(), outside[g].begin(), outside[g].end());
      outside[g].clear();
    }
    for (const int cand : orphans) {
      if (cand != pid) assign(cand, created);
    }
  }

  const std::vector<int> live = b.live_vertices();
  std::vector<int> remap(centered.size(), -1);
  Polytope poly;
  poly.dim = 3;
  poly.affine_dim = 3;
  poly.tolerance = b.plane_eps();
  poly.vertices.reserve(live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    remap[live[k]] = static_cast<int>(k);
    poly.vertices.push_back(lift(Eigen::Vector3d(centered[live[k]] + shift)));
  }
  int n_live = 0;
  for (int f = 0; f < b.face_count(); ++f)
    if (b.face(f).alive) ++n_live;
  poly.faces.reserve(n_live);
  poly.H.resize(n_live, 3);
  poly.d.resize(n_live);
  int row = 0;
  for (int f = 0; f < b.face_count(); ++f) {
    const auto& face = b.face(f);
    if (!face.alive) continue;
    poly.faces.push_back({remap[face.v[0]], remap[face.v[1]], remap[face.v[2]]});
    poly.H.row(row) = face.n.transpose();
    poly.d[row] = face.d + face.n.dot(shift);
    ++row;
  }
  return poly;
}

Polytope segment_poly2(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       double radius) {
  Polytope poly;
  poly.dim = 2;
  poly.affine_dim = 1;
  poly.tolerance = kEpsScale * radius;
  poly.vertices = {lift(a), lift(b)};
  poly.faces = {{0, 1}};
  const Eigen::Vector2d u = (b - a).normalized();
  const Eigen::Vector2d w(-u.y(), u.x());
  poly.H.resize(4, 2);
  poly.d.resize(4);
  poly.H << u.transpose(), -u.transpose(), w.transpose(), -w.transpose();
  poly.d << u.dot(b), -u.dot(a), w.dot(a), -w.dot(a);
  return poly;
}

Polytope segment_poly3(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                       double radius) {
  Polytope poly;
  poly.dim = 3;
  poly.affine_dim = 1;
  poly.tolerance = kEpsScale * radius;
  poly.vertices = {lift(a), lift(b)};
  poly.faces = {{0, 1}};
  const Eigen::Vector3d u = (b - a).normalized();
  const Eigen::Vector3d w1 = any_orthogonal(u);
  const Eigen::Vector3d w2 = u.cross(w1);
  poly.H.resize(6, 3);
  poly.d.resize(6);
  poly.H << u.transpose(), -u.transpose(), w1.transpose(), -w1.transpose(),
      w2.transpose(), -w2.transpose();
  poly.d << u.dot(b), -u.dot(a), w1.dot(a), -w1.dot(a), w2.dot(a), -w2.dot(a);
  return poly;
}

Polytope hull2_full(const std::vector<Eigen::Vector2d>& centered,
                    const Eigen::Vector2d& shift, double radius) {
  std::vector<int> ids(centered.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<int>(k);
  const std::vector<int> ring = monotone_chain(centered, ids, radius);
  if (ring.size() == 2)
    return segment_poly2(centered[ring[0]] + shift, centered[ring[1]] + shift, radius);

  Polytope poly;
  poly.dim = 2;
  poly.affine_dim = 2;
  poly.tolerance = kEpsScale * radius;
  const int nv = static_cast<int>(ring.size());
  if (nv < 3) throw std::logic_error("hull2_full: degenerate ring");
  poly.vertices.reserve(nv);
  for (const int id : ring)
    poly.vertices.push_back(lift(Eigen::Vector2d(centered[id] + shift)));
  poly.faces.reserve(nv);
  poly.H.resize(nv, 2);
  poly.d.resize(nv);
  for (int k = 0; k < nv; ++k) {
    const int a = ring[k], bvx = ring[(k + 1) % nv];
    poly.faces.push_back({k, (k + 1) % nv});
    const Eigen::Vector2d dir = centered[bvx] - centered[a];
    const Eigen::Vector2d n = Eigen::Vector2d(dir.y(), -dir.x()).normalized();
    poly.H.row(k) = n.transpose();
    poly.d[k] = n.dot(centered[a] + shift);
  }
  return poly;
}

void box_rows(const Eigen::VectorXd& v, Polytope* poly) {
  const int m = static_cast<int>(v.size());
  poly->H.resize(2 * m, m);
  poly->d.resize(2 * m);
  poly->H << Eigen::MatrixXd::Identity(m, m), -Eigen::MatrixXd::Identity(m, m);
  poly->d << v, -v;
}

}  // namespace

Polytope convex_hull(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw std::invalid_argument("convex_hull: no points given");
  const int m = static_cast<int>(points[0].size());
  if (m != 2 && m != 3)
    throw std::invalid_argument("convex_hull: points must be 2- or 3-dimensional");
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(m);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != m)
      throw std::invalid_argument("convex_hull: mixed point dimensions");
    if (!p.allFinite()) throw std::invalid_argument("convex_hull: non-finite point");
    shift += p;
  }
  shift /= static_cast<double>(points.size());

  double radius = 1e-300;
  for (const auto& p : points) radius = std::max(radius, (p - shift).norm());
  const double eps = kEpsScale * radius;

  if (m == 3) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(points.size());
    for (const auto& p : points) pts.push_back(Eigen::Vector3d(p) - Eigen::Vector3d(shift));
    const Frame3 fr = affine_frame3(pts, eps);
    Polytope poly;
    poly.dim = 3;
    poly.tolerance = eps;
    if (fr.rank == 3) return hull3_full(pts, shift);
    if (fr.rank == 0) {
      poly.affine_dim = 0;
      poly.vertices.push_back(points[fr.id[0]]);
      box_rows(points[fr.id[0]], &poly);
      return poly;
    }
    if (fr.rank == 1) {
      const Eigen::Vector3d u = (pts[fr.id[1]] - pts[fr.id[0]]).normalized();
      int lo = 0, hi = 0;
      for (int k = 1; k < static_cast<int>(pts.size()); ++k) {
        if (u.dot(pts[k]) < u.dot(pts[lo])) lo = k;
        if (u.dot(pts[k]) > u.dot(pts[hi])) hi = k;
      }
      return segment_poly3(points[lo], points[hi], radius);
    }
    // rank 2: planar polygon embedded in 3D
    const Eigen::Vector3d b1 = (pts[fr.id[1]] - pts[fr.id[0]]).normalized();
    Eigen::Vector3d b2 = pts[fr.id[2]] - pts[fr.id[0]];
    b2 = (b2 - b1.dot(b2) * b1).normalized();
    const Eigen::Vector3d npl = b1.cross(b2);
    std::vector<Eigen::Vector2d> flat;
    flat.reserve(pts.size());
    for (const auto& p : pts) flat.emplace_back(b1.dot(p), b2.dot(p));
    std::vector<int> ids(flat.size());
    for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<int>(k);
    const std::vector<int> ring = monotone_chain(flat, ids, radius);
    const int nv = static_cast<int>(ring.size());
    if (nv == 2) return segment_poly3(points[ring[0]], points[ring[1]], radius);
    if (nv < 2) throw std::logic_error("convex_hull: planar ring collapsed");
    poly.affine_dim = 2;
    for (const int id : ring) poly.vertices.push_back(points[id]);
    for (int k = 0; k + 2 < nv; ++k) poly.faces.push_back({0, k + 1, k + 2});
    poly.H.resize(nv + 2, 3);
    poly.d.resize(nv + 2);
    for (int k = 0; k < nv; ++k) {
      const Eigen::Vector3d a = pts[ring[k]], bb = pts[ring[(k + 1) % nv]];
      const Eigen::Vector3d ne = (bb - a).cross(npl).normalized();
      poly.H.row(k) = ne.transpose();
      poly.d[k] = ne.dot(a + Eigen::Vector3d(shift));
    }
    const double dpl = npl.dot(pts[fr.id[0]] + Eigen::Vector3d(shift));
    poly.H.row(nv) = npl.transpose();
    poly.d[nv] = dpl;
    poly.H.row(nv + 1) = -npl.transpose();
    poly.d[nv + 1] = -dpl;
    return poly;
  }

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(Eigen::Vector2d(p) - Eigen::Vector2d(shift));
  const Frame2 fr = affine_frame2(pts, eps);
  Polytope poly;
  poly.dim = 2;
  poly.tolerance = eps;
  if (fr.rank == 2) return hull2_full(pts, shift, radius);
  if (fr.rank == 0) {
    poly.affine_dim = 0;
    poly.vertices.push_back(points[fr.id[0]]);
    box_rows(points[fr.id[0]], &poly);
    return poly;
  }
  const Eigen::Vector2d u = (pts[fr.id[1]] - pts[fr.id[0]]).normalized();
  int lo = 0, hi = 0;
  for (int k = 1; k < static_cast<int>(pts.size()); ++k) {
    if (u.dot(pts[k]) < u.dot(pts[lo])) lo = k;
    if (u.dot(pts[k]) > u.dot(pts[hi])) hi = k;
  }
  return segment_poly2(points[lo], points[hi], radius);
}

}  // namespace reachspan
