#include "dcol/proximity.hpp"

namespace dcol {

namespace {

constexpr double kDegenerateAlpha = 1e-8;

ProximityResult finish(SolveResult&& solve, VariableMap map) {
  ProximityResult result;
  result.alpha = solve.x(VariableMap::alpha_col);
  result.x_int = solve.x.head<3>();
  result.solve = std::move(solve);
  result.pair_map = map;
  return result;
}

}  // namespace

ProximityResult min_scaling(const Shape& shape1, const Pose& pose1, const Shape& shape2,
                            const Pose& pose2, const SolverSettings& settings) {
  Solver solver(settings);
  return min_scaling(solver, shape1, pose1, shape2, pose2);
}

ProximityResult min_scaling(Solver& solver, const Shape& shape1, const Pose& pose1,
                            const Shape& shape2, const Pose& pose2) {
  auto [problem, map] = assemble_pair(shape1, pose1, shape2, pose2);
  return finish(solver.solve(problem), map);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> contact_points(const ProximityResult& result,
                                                           const Pose& pose1,
                                                           const Pose& pose2) {
  if (!result.optimal()) {
    throw std::logic_error("contact_points: result is not Optimal");
  }
  if (result.alpha <= kDegenerateAlpha) {
    throw DegenerateContact("contact_points: alpha ~ 0 (coincident origins)");
  }
  const auto scale_back = [&](const Eigen::Vector3d& r) -> Eigen::Vector3d {
    return r + (result.x_int - r) / result.alpha;
  };
  return {scale_back(pose1.position), scale_back(pose2.position)};
}

double contact_distance(const ProximityResult& result, const Pose& pose1,
                        const Pose& pose2) {
  if (!result.optimal()) {
    throw std::logic_error("contact_distance: result is not Optimal");
  }
  if (result.alpha <= kDegenerateAlpha) {
    throw DegenerateContact("contact_distance: alpha ~ 0 (coincident origins)");
  }
  const Eigen::Vector3d d = pose1.position - pose2.position;
  return (d + (pose2.position - pose1.position) / result.alpha).norm();
}

}  // namespace dcol
