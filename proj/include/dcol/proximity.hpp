#pragma once

#include <stdexcept>
#include <utility>

#include "dcol/assembly.hpp"

namespace dcol {

/// Minimum-scaling query result. alpha > 1 means the bodies are separated,
/// alpha < 1 interpenetrating, alpha ~ 1 touching. Non-Optimal statuses
/// must be treated as no-answer, never as "no collision".
struct ProximityResult {
  double alpha = 0.0;
  Eigen::Vector3d x_int{0.0, 0.0, 0.0};  // intersection point of the scaled bodies
  SolveResult solve;                     // retained for differentiation
  VariableMap pair_map;

  bool optimal() const { return solve.status == SolveStatus::Optimal; }
};

/// Thrown when contact points are requested at alpha ~ 0 (coincident
/// origins), where the scale-back map is undefined.
struct DegenerateContact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Smallest uniform scaling of both bodies about their origins that makes
/// them intersect. Creates a fresh solver workspace per call, so
/// independent queries may run fully in parallel.
ProximityResult min_scaling(const Shape& shape1, const Pose& pose1, const Shape& shape2,
                            const Pose& pose2, const SolverSettings& settings = {});

/// Same, reusing the given solver's workspace (single-threaded use).
ProximityResult min_scaling(Solver& solver, const Shape& shape1, const Pose& pose1,
                            const Shape& shape2, const Pose& pose2);

/// Contact point on each unscaled body: p_i = r_i + (x* - r_i) / alpha*.
std::pair<Eigen::Vector3d, Eigen::Vector3d> contact_points(const ProximityResult& result,
                                                           const Pose& pose1,
                                                           const Pose& pose2);

/// |p1 - p2| evaluated as |1 - 1/alpha| * |r1 - r2|. This is the distance
/// between the scaled-back contact points, not in general the minimum
/// translation distance between the bodies.
double contact_distance(const ProximityResult& result, const Pose& pose1,
                        const Pose& pose2);

/// Strict-penetration convenience predicate; margin policies belong to
/// callers, who should threshold alpha directly.
inline bool in_penetration(const ProximityResult& result) { return result.alpha < 1.0; }

}  // namespace dcol
