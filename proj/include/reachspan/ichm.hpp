#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "reachspan/horizon.hpp"
#include "reachspan/polytope.hpp"

namespace reachspan {

/// Enumerates the reachable-space polytope {P tau + x_star : A tau <= b}.
///
/// Support directions are probed with warm-started LPs and the optima are
/// folded into an incremental hull; a face is refined while the LP can push
/// it outward by more than `delta` (meters). The result under-approximates
/// the exact projection, which lies within `delta` outward of every face.
/// Each vertex carries its torque witness in `generators`.
///
/// An infeasible problem yields an empty polytope. Throws
/// std::invalid_argument for malformed inputs or delta <= 0, and
/// std::runtime_error when the constraint rows fail to bound the projection.
Polytope ichm(const ProjectionProblem& problem, double delta);

/// Extent of one link, as anchor points rigidly attached to the chain. A
/// segment envelope carries the two ends of the link axis; a vertex-set
/// envelope lists the corners of a bounding volume around the link.
struct LinkEnvelope {
  enum class Kind { Segment, VertexSet };
  struct Anchor {
    int frame = 0;
    Eigen::Vector3d local_point = Eigen::Vector3d::Zero();
  };
  Kind kind = Kind::VertexSet;
  std::vector<Anchor> anchors;
};

/// Reachable space of a whole link: the hull union of the reachable
/// polytopes of its anchor points. An anchor whose projection problem is
/// infeasible contributes nothing; a note per skipped anchor is appended to
/// `warnings` when given.
Polytope link_reachable(const RobotModel& model, const RobotState& state,
                        const LinkEnvelope& envelope, const HorizonSpec& horizon,
                        double delta, std::vector<std::string>* warnings = nullptr);

}  // namespace reachspan
