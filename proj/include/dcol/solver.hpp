#pragma once

#include <Eigen/Core>

#include <memory>
#include <stdexcept>

#include "dcol/cones.hpp"

namespace dcol {

/// Standard-form conic program
///   minimize    c'x
///   subject to  h - Gx in K
/// with K described by `cone` (orthant rows first, then SOC blocks in order).
struct ProblemData {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  ConeSpec cone;
};

struct SolverSettings {
  double tol_gap = 1e-8;    // complementarity gap s'z / degree
  double tol_feas = 1e-8;   // primal/dual residual inf-norms
  int max_iters = 50;
  double boundary_fraction = 0.99;  // fraction of the step to the cone boundary
  double static_regularization = 1e-10;
  int verbosity = 0;
};

enum class SolveStatus { Optimal, MaxIters, NumericalFailure };

const char* to_string(SolveStatus status);

/// Factored reduced Newton system
///   [ 0   G' ] [dx]   [rhs_x]
///   [ G  -W'W] [dz] = [rhs_z]
/// held as an unpivoted LDL' of the statically regularized matrix (the
/// z-block is ordered first, which keeps the ordering quasidefinite).
/// Solves apply one round of iterative refinement against the
/// unregularized matrix.
class KktSystem {
 public:
  KktSystem() = default;

  void assemble(const Eigen::MatrixXd& G, const ScalingBlocks& scaling,
                double regularization);
  /// Returns false when a pivot falls below the regularization floor.
  bool factor();

  void solve(const Eigen::VectorXd& rhs_x, const Eigen::VectorXd& rhs_z,
             Eigen::VectorXd& dx, Eigen::VectorXd& dz) const;

  bool factored() const { return factored_; }
  Index num_vars() const { return n_; }
  Index num_rows() const { return m_; }

  /// Ratio of extreme pivot magnitudes; a cheap conditioning estimate for
  /// flagging near-degenerate differentiation requests.
  double conditioning() const;

 private:
  void solve_inplace(Eigen::VectorXd& b) const;

  Index n_ = 0, m_ = 0;
  double reg_ = 0.0;
  Eigen::MatrixXd kkt_;   // unregularized, permuted (z first), full
  Eigen::MatrixXd fact_;  // unit-lower factor of the regularized matrix
  Eigen::VectorXd d_;     // pivots
  bool factored_ = false;
};

struct SolveResult {
  Eigen::VectorXd x;
  ConeVec s;  // slack h - Gx
  ConeVec z;  // dual, in K*
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  /// Newton system factored at the final iterate; shared so the result may
  /// outlive the solver. Null when the solve failed numerically.
  std::shared_ptr<const KktSystem> kkt_factorization;
};

struct KktResiduals {
  double r_dual;    // ||c + G'z||_inf
  double r_primal;  // ||h - Gx - s||_inf
  double gap;       // s'z / degree
};

KktResiduals kkt_residuals(const ProblemData& problem, const Eigen::VectorXd& x,
                           const ConeVec& s, const ConeVec& z);

/// Thrown by solve_newton when a result carries no usable factorization.
struct InvalidFactorization : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves the retained reduced Newton system for an arbitrary right-hand
/// side. No new factorization is performed.
void solve_newton(const KktSystem& kkt, const Eigen::VectorXd& rhs_x,
                  const Eigen::VectorXd& rhs_z, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dz);
void solve_newton(const SolveResult& result, const Eigen::VectorXd& rhs_x,
                  const Eigen::VectorXd& rhs_z, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dz);

/// Primal-dual interior-point solver for the small dense problems this
/// library assembles. A Solver owns mutable workspace: do not share one
/// instance across threads; distinct instances are independent.
class Solver {
 public:
  explicit Solver(SolverSettings settings = {}) : settings_(settings) {}

  SolveResult solve(const ProblemData& problem);

  SolverSettings& settings() { return settings_; }
  const SolverSettings& settings() const { return settings_; }

  /// Number of KKT factorizations performed so far (instrumentation).
  long factorization_count() const { return factorization_count_; }

 private:
  SolverSettings settings_;
  long factorization_count_ = 0;

  // workspace, reused across solves
  KktSystem kkt_;
  Eigen::VectorXd x_, s_, z_, lambda_;
  Eigen::VectorXd r_dual_, r_primal_;
  Eigen::VectorXd dx_, dz_, ds_, rhs_z_, d_target_;
};

/// One-shot convenience wrapper; creates a fresh workspace per call.
SolveResult solve(const ProblemData& problem, const SolverSettings& settings = {});

}  // namespace dcol
