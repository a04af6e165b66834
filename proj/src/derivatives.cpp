#include "dcol/derivatives.hpp"

namespace dcol {

void ProblemDataJacobian::apply_dG_transpose(int k, const Eigen::VectorXd& z,
                                             Eigen::VectorXd& out) const {
  for (const Entry& e : dG[k]) out(e.col) += e.value * z(e.row);
}

void ProblemDataJacobian::apply_dG(int k, const Eigen::VectorXd& x,
                                   Eigen::VectorXd& out) const {
  for (const Entry& e : dG[k]) out(e.row) += e.value * x(e.col);
}

namespace {

// Scatters one body's 7-parameter block jacobian into the assembled layout.
void scatter_body(const BlockJacobian& bj, const ConstraintBlock& blk,
                  const VariableMap::Body& body, int param_offset,
                  ProblemDataJacobian& out) {
  const Index soc_rows = blk.rows() - blk.orthant_rows;
  for (int k = 0; k < 7; ++k) {
    const int kg = param_offset + k;

    const auto scatter_rows = [&](Index block_row, Index global_row, Index count) {
      for (Index i = 0; i < count; ++i) {
        out.dh(global_row + i, kg) = bj.dh[k](block_row + i);
        for (Index c = 0; c < blk.cols(); ++c) {
          const double v = bj.dG[k](block_row + i, c);
          if (v == 0.0) continue;
          const Index gc = c < 4 ? c : body.slack_col + (c - 4);
          out.dG[kg].push_back({global_row + i, gc, v});
        }
      }
    };
    scatter_rows(0, body.orthant_row, blk.orthant_rows);
    scatter_rows(blk.orthant_rows, body.soc_row, soc_rows);
  }
}

}  // namespace

ProblemDataJacobian problem_jacobian(const Shape& shape1, const Pose& pose1,
                                     const Shape& shape2, const Pose& pose2) {
  // Rebuild the pair layout; the blocks are cheap relative to any solve.
  auto [problem, map] = assemble_pair(shape1, pose1, shape2, pose2);
  const ConstraintBlock b1 = constraint_block(shape1, pose1);
  const ConstraintBlock b2 = constraint_block(shape2, pose2);

  ProblemDataJacobian jac;
  jac.num_rows = map.num_rows;
  jac.num_vars = map.num_vars;
  jac.dh.setZero(map.num_rows, kNumPoseParams);

  scatter_body(constraint_block_jacobian(shape1, pose1), b1, map.bodies[0], 0, jac);
  scatter_body(constraint_block_jacobian(shape2, pose2), b2, map.bodies[1], 7, jac);
  return jac;
}

PoseGradient grad_alpha(const ProximityResult& result, const ProblemDataJacobian& jac) {
  if (!result.optimal()) {
    throw std::logic_error("grad_alpha: result is not Optimal");
  }
  const Eigen::VectorXd& x = result.solve.x;
  const Eigen::VectorXd& z = result.solve.z;
  PoseGradient g;
  for (int k = 0; k < kNumPoseParams; ++k) {
    double acc = 0.0;
    for (const auto& e : jac.dG[k]) acc += z(e.row) * e.value * x(e.col);
    acc -= z.dot(jac.dh.col(k));
    g(k) = acc;
  }
  return g;
}

SolutionJacobian solution_jacobian(const ProximityResult& result,
                                   const ProblemDataJacobian& jac) {
  if (!result.optimal()) {
    throw std::logic_error("solution_jacobian: result is not Optimal");
  }
  if (!result.solve.kkt_factorization) {
    throw InvalidFactorization("solution_jacobian: no retained factorization");
  }
  const Eigen::VectorXd& x = result.solve.x;
  const Eigen::VectorXd& z = result.solve.z;

  SolutionJacobian sj;
  sj.kkt_conditioning = result.solve.kkt_factorization->conditioning();

  Eigen::VectorXd rhs_x(jac.num_vars), rhs_z(jac.num_rows), dx, dz;
  for (int k = 0; k < kNumPoseParams; ++k) {
    // Differentiated stationarity: G' dz = -dG_k' z.
    rhs_x.setZero();
    jac.apply_dG_transpose(k, z, rhs_x);
    rhs_x = -rhs_x;
    // Differentiated complementarity, scaled: G dx - W'W dz = dh_k - dG_k x.
    rhs_z = jac.dh.col(k);
    Eigen::VectorXd dGx = Eigen::VectorXd::Zero(jac.num_rows);
    jac.apply_dG(k, x, dGx);
    rhs_z -= dGx;

    solve_newton(result.solve, rhs_x, rhs_z, dx, dz);
    sj.dx_dtheta.col(k) = dx.head<3>();
    sj.dalpha_dtheta(0, k) = dx(VariableMap::alpha_col);
  }
  return sj;
}

ContactPointJacobians contact_point_jacobians(const ProximityResult& result,
                                              const Pose& pose1, const Pose& pose2,
                                              const SolutionJacobian& sj) {
  if (result.alpha < 1e-6) {
    throw DegenerateContact("contact_point_jacobians: alpha below 1e-6");
  }
  const double a = result.alpha;
  ContactPointJacobians out;

  const auto body_jac = [&](const Pose& pose, int r_offset) {
    Eigen::Matrix<double, 3, kNumPoseParams> dr =
        Eigen::Matrix<double, 3, kNumPoseParams>::Zero();
    dr.block<3, 3>(0, r_offset).setIdentity();
    const Eigen::Vector3d v = result.x_int - pose.position;
    return (dr * (1.0 - 1.0 / a) + sj.dx_dtheta / a -
            (v / (a * a)) * sj.dalpha_dtheta)
        .eval();
  };
  out.dp1_dtheta = body_jac(pose1, 0);
  out.dp2_dtheta = body_jac(pose2, 7);
  return out;
}

PoseGradient project_quaternion_tangent(const Pose& pose1, const Pose& pose2,
                                        const PoseGradient& grad) {
  PoseGradient out = grad;
  const auto project = [&out](const Eigen::Vector4d& q, int offset) {
    const Eigen::Vector4d qn = q / q.norm();
    out.segment<4>(offset) -= qn * qn.dot(out.segment<4>(offset));
  };
  project(pose1.quaternion, 3);
  project(pose2.quaternion, 10);
  return out;
}

}  // namespace dcol
