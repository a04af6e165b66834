#pragma once

#include "dcol/proximity.hpp"

namespace dcol {

/// Pose parameter layout for sensitivities: theta = (r1, q1, r2, q2) with
/// the quaternions treated as four free parameters of the rotation formula
/// (no unit-norm projection inside the derivatives; compose with an
/// attitude Jacobian downstream if a tangent-space gradient is wanted).
inline constexpr int kNumPoseParams = 14;

using PoseGradient = Eigen::Matrix<double, kNumPoseParams, 1>;

/// Exact partials of the assembled (G, h) with respect to theta. dG is kept
/// as per-parameter triplets: every parameter touches only the rows and
/// columns owned by its body. The objective c never depends on theta.
struct ProblemDataJacobian {
  struct Entry {
    Index row;
    Index col;
    double value;
  };

  std::array<std::vector<Entry>, kNumPoseParams> dG;
  Eigen::MatrixXd dh;  // num_rows x 14
  Index num_rows = 0;
  Index num_vars = 0;

  /// dG_k' z accumulated into out (out must be zeroed, length num_vars).
  void apply_dG_transpose(int k, const Eigen::VectorXd& z, Eigen::VectorXd& out) const;
  /// dG_k x accumulated into out (out must be zeroed, length num_rows).
  void apply_dG(int k, const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
};

ProblemDataJacobian problem_jacobian(const Shape& shape1, const Pose& pose1,
                                     const Shape& shape2, const Pose& pose2);

/// Gradient of alpha* with respect to theta via the Lagrangian:
/// d(alpha)/d(theta_k) = z*' (dG_k x* - dh_k). Matrix-vector products only,
/// no linear solves.
PoseGradient grad_alpha(const ProximityResult& result, const ProblemDataJacobian& jac);

struct SolutionJacobian {
  Eigen::Matrix<double, 3, kNumPoseParams> dx_dtheta;
  Eigen::Matrix<double, 1, kNumPoseParams> dalpha_dtheta;
  /// Pivot-ratio estimate of the retained KKT factorization; very large
  /// values flag near-degenerate contacts where the sensitivities may not
  /// exist (results are then best-effort).
  double kkt_conditioning = 0.0;
};

/// Full solution sensitivities by differentiating the stationarity and
/// complementarity residuals at (x*, z*); every right-hand side reuses the
/// factorization retained by the solve, so no new factorizations happen.
SolutionJacobian solution_jacobian(const ProximityResult& result,
                                   const ProblemDataJacobian& jac);

struct ContactPointJacobians {
  Eigen::Matrix<double, 3, kNumPoseParams> dp1_dtheta;
  Eigen::Matrix<double, 3, kNumPoseParams> dp2_dtheta;
};

/// Chain rule through p_i = r_i + (x* - r_i)/alpha*. Requires alpha
/// bounded away from zero (>= 1e-6).
ContactPointJacobians contact_point_jacobians(const ProximityResult& result,
                                              const Pose& pose1, const Pose& pose2,
                                              const SolutionJacobian& sj);

/// Utility off the differentiation path: projects the two quaternion blocks
/// of a raw 14-parameter gradient onto the tangent space of the unit-norm
/// constraint at the given poses.
PoseGradient project_quaternion_tangent(const Pose& pose1, const Pose& pose2,
                                        const PoseGradient& grad);

}  // namespace dcol
