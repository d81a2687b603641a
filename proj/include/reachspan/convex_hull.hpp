#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <vector>

#include "reachspan/polytope.hpp"

namespace reachspan {

/// Convex hull of a set of 2D or 3D points (all the same size).
///
/// Full-dimensional inputs produce a solid polytope with triangle faces
/// (3D) or a counter-clockwise edge ring (2D). Lower-dimensional inputs are
/// not an error: the result carries the reduced affine_dim, the extreme
/// points of the flat set and a half-space description that pins the
/// containing flat.
Polytope convex_hull(const std::vector<Eigen::VectorXd>& points);

/// Incremental 3D hull used by the polytope enumeration loop and, with
/// conflict sets, by the batch convex_hull driver.
///
/// Points live in an append-only arena; faces are append-only with an alive
/// flag, so face ids handed out earlier stay valid as identifiers after the
/// face dies. All tie-breaking is index-ordered, which makes every build
/// deterministic for a given insertion sequence.
class Hull3Builder {
 public:
  struct Face {
    std::array<int, 3> v;
    std::array<int, 3> nb;
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    double d = 0.0;
    bool alive = false;
  };

  /// Picks 4 affinely independent seed points and builds the initial
  /// tetrahedron. Returns false when the input spans fewer than 3
  /// dimensions; the builder is unusable in that case.
  bool seed(const std::vector<Eigen::Vector3d>& points);

  /// Inserts one point. Returns ids of the newly created faces, empty when
  /// the point is inside (or within plane_eps of) the current hull. `hint`
  /// may name a face already known to see the point. `dead`, when non-null,
  /// receives the ids of faces removed by this insertion.
  std::vector<int> insert(const Eigen::Vector3d& p, int hint = -1,
                          std::vector<int>* dead = nullptr);

  /// Same as insert for a point already in the arena. When topology repair
  /// is needed and `allow_rebuild` is set, the hull is rebuilt from its live
  /// vertices plus this point (face ids are retired, never reused).
  std::vector<int> insert_id(int pid, int hint, std::vector<int>* dead,
                             bool allow_rebuild);

  const Face& face(int id) const { return faces_[id]; }
  int face_count() const { return static_cast<int>(faces_.size()); }
  const std::vector<Eigen::Vector3d>& points() const { return pts_; }

  /// Plane-thickness epsilon: 1e-12 times the bounding radius seen so far.
  double plane_eps() const;

  /// Ids of arena points referenced by at least one live face, ascending.
  std::vector<int> live_vertices() const;

 private:
  int new_face(int a, int b, int c, bool allow_flip);
  std::vector<int> rebuild_from(const std::vector<int>& ids, std::vector<int>* dead);

  std::vector<Eigen::Vector3d> pts_;
  std::vector<Face> faces_;
  Eigen::Vector3d interior_ = Eigen::Vector3d::Zero();
  double radius_ = 1.0;
};

/// Incremental 2D hull with the same id discipline as Hull3Builder. The
/// hull is a counter-clockwise vertex ring; "faces" are its directed edges.
class Hull2Builder {
 public:
  struct Edge {
    std::array<int, 2> v;
    Eigen::Vector2d n = Eigen::Vector2d::Zero();
    double d = 0.0;
    bool alive = false;
  };

  bool seed(const std::vector<Eigen::Vector2d>& points);

  std::vector<int> insert(const Eigen::Vector2d& p, int hint = -1,
                          std::vector<int>* dead = nullptr);

  const Edge& face(int id) const { return edges_[id]; }
  int face_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Eigen::Vector2d>& points() const { return pts_; }
  double plane_eps() const;
  std::vector<int> live_vertices() const;

  /// Current ring as arena ids in counter-clockwise order.
  const std::vector<int>& ring() const { return ring_; }

 private:
  void rebuild_ring(std::vector<int>* created, std::vector<int>* dead);

  std::vector<Eigen::Vector2d> pts_;
  std::vector<Edge> edges_;
  std::vector<int> ring_;
  std::map<std::pair<int, int>, int> edge_ids_;
  double radius_ = 1.0;
};

}  // namespace reachspan
