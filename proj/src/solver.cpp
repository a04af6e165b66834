#include "dcol/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dcol {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void KktSystem::assemble(const Eigen::MatrixXd& G, const ScalingBlocks& scaling,
                         double regularization) {
  m_ = G.rows();
  n_ = G.cols();
  reg_ = regularization;
  const Index N = m_ + n_;
  kkt_.setZero(N, N);
  kkt_.topLeftCorner(m_, m_).setZero();
  scaling.subtract_gram(kkt_.topLeftCorner(m_, m_));
  kkt_.topRightCorner(m_, n_) = G;
  kkt_.bottomLeftCorner(n_, m_) = G.transpose();
  factored_ = false;
}

bool KktSystem::factor() {
  const Index N = m_ + n_;
  fact_ = kkt_;
  // Static regularization: -reg on the scaled block, +reg on the variable
  // block (the permuted matrix stays quasidefinite).
  for (Index i = 0; i < m_; ++i) fact_(i, i) -= reg_;
  for (Index i = m_; i < N; ++i) fact_(i, i) += reg_;

  // Pivots of the regularized quasidefinite matrix stay at or above the
  // regularization scale unless the system is genuinely singular.
  const double pivot_floor = reg_ > 0 ? 0.1 * reg_ : 1e-14;

  d_.resize(N);
  Eigen::VectorXd w(N);
  for (Index j = 0; j < N; ++j) {
    w.head(j) = fact_.row(j).head(j).transpose().cwiseProduct(d_.head(j));
    double dj = fact_(j, j) - fact_.row(j).head(j).dot(w.head(j));
    if (std::abs(dj) < pivot_floor || !std::isfinite(dj)) {
      factored_ = false;
      return false;
    }
    d_(j) = dj;
    const Index r = N - j - 1;
    if (r > 0) {
      fact_.col(j).tail(r) -= fact_.bottomLeftCorner(r, j) * w.head(j);
      fact_.col(j).tail(r) /= dj;
    }
  }
  factored_ = true;
  return true;
}

void KktSystem::solve_inplace(Eigen::VectorXd& b) const {
  fact_.triangularView<Eigen::UnitLower>().solveInPlace(b);
  b.array() /= d_.array();
  fact_.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(b);
}

void KktSystem::solve(const Eigen::VectorXd& rhs_x, const Eigen::VectorXd& rhs_z,
                      Eigen::VectorXd& dx, Eigen::VectorXd& dz) const {
  if (!factored_) throw InvalidFactorization("KktSystem::solve: not factored");
  if (rhs_x.size() != n_ || rhs_z.size() != m_) {
    throw std::invalid_argument("KktSystem::solve: right-hand side size mismatch");
  }
  const Index N = m_ + n_;
  Eigen::VectorXd b(N);
  b.head(m_) = rhs_z;
  b.tail(n_) = rhs_x;

  Eigen::VectorXd y = b;
  solve_inplace(y);
  // One round of iterative refinement against the unregularized matrix.
  Eigen::VectorXd resid = b - kkt_ * y;
  solve_inplace(resid);
  y += resid;

  dz = y.head(m_);
  dx = y.tail(n_);
}

double KktSystem::conditioning() const {
  if (!factored_) return kInfinity;
  const double dmax = d_.cwiseAbs().maxCoeff();
  const double dmin = d_.cwiseAbs().minCoeff();
  return dmin > 0 ? dmax / dmin : kInfinity;
}

void solve_newton(const KktSystem& kkt, const Eigen::VectorXd& rhs_x,
                  const Eigen::VectorXd& rhs_z, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dz) {
  if (!kkt.factored()) {
    throw InvalidFactorization("solve_newton: factorization is not valid");
  }
  kkt.solve(rhs_x, rhs_z, dx, dz);
}

void solve_newton(const SolveResult& result, const Eigen::VectorXd& rhs_x,
                  const Eigen::VectorXd& rhs_z, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dz) {
  if (!result.kkt_factorization) {
    throw InvalidFactorization("solve_newton: result carries no factorization");
  }
  solve_newton(*result.kkt_factorization, rhs_x, rhs_z, dx, dz);
}

KktResiduals kkt_residuals(const ProblemData& problem, const Eigen::VectorXd& x,
                           const ConeVec& s, const ConeVec& z) {
  if (x.size() != problem.G.cols() || s.size() != problem.G.rows() ||
      z.size() != problem.G.rows()) {
    throw std::invalid_argument("kkt_residuals: dimension mismatch");
  }
  KktResiduals r;
  r.r_dual = (problem.c + problem.G.transpose() * z).lpNorm<Eigen::Infinity>();
  r.r_primal = (problem.h - problem.G * x - s).lpNorm<Eigen::Infinity>();
  r.gap = s.dot(z) / static_cast<double>(problem.cone.degree());
  return r;
}

namespace {

void validate_problem(const ProblemData& p) {
  const Index n = p.c.size();
  const Index m = p.h.size();
  if (p.G.rows() != m || p.G.cols() != n) {
    throw std::invalid_argument("solve: G dimensions do not match c and h");
  }
  if (p.cone.dim() != m) {
    throw std::invalid_argument("solve: cone dimension does not match row count");
  }
  if (n == 0 || m == 0) {
    throw std::invalid_argument("solve: empty problem");
  }
}

}  // namespace

SolveResult Solver::solve(const ProblemData& problem) {
  validate_problem(problem);

  const Index n = problem.c.size();
  const Index m = problem.h.size();
  const ConeSpec& cone = problem.cone;
  const double nu = static_cast<double>(cone.degree());
  const ConeVec e = identity(cone);
  const double reg = settings_.static_regularization;

  SolveResult result;
  result.status = SolveStatus::NumericalFailure;
  result.iterations = 0;

  auto fail = [&]() -> SolveResult& {
    result.x = x_;
    result.s = s_;
    result.z = z_;
    result.status = SolveStatus::NumericalFailure;
    return result;
  };

  // Initialization: Newton solve at identity scaling, then shift the
  // candidate slack and dual into the interior.
  kkt_.assemble(problem.G, ScalingBlocks::identity(cone), reg);
  ++factorization_count_;
  x_.setZero(n);
  s_.setZero(m);
  z_.setZero(m);
  if (!kkt_.factor()) return fail();

  Eigen::VectorXd zero_n = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd zero_m = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd z_cand;
  kkt_.solve(zero_n, problem.h, x_, z_cand);
  s_ = -z_cand;
  const double shift_p = interior_shift(cone, s_);
  if (shift_p >= 0) s_ += (1.0 + shift_p) * e;

  Eigen::VectorXd x_tmp;
  kkt_.solve(-problem.c, zero_m, x_tmp, z_);
  const double shift_d = interior_shift(cone, z_);
  if (shift_d >= 0) z_ += (1.0 + shift_d) * e;

  bool converged = false;
  int iter = 0;
  for (;; ++iter) {
    r_dual_ = problem.c + problem.G.transpose() * z_;
    r_primal_ = problem.G * x_ + s_ - problem.h;
    const double sz = s_.dot(z_);
    const double gap = sz / nu;
    const double rd_norm = r_dual_.lpNorm<Eigen::Infinity>();
    const double rp_norm = r_primal_.lpNorm<Eigen::Infinity>();

    if (settings_.verbosity > 0) {
      std::fprintf(stderr, "iter %2d  gap %9.2e  rd %9.2e  rp %9.2e\n", iter,
                   gap, rd_norm, rp_norm);
    }

    if (gap <= settings_.tol_gap && rd_norm <= settings_.tol_feas &&
        rp_norm <= settings_.tol_feas) {
      converged = true;
      break;
    }
    if (iter >= settings_.max_iters) break;

    auto scaling = nt_scaling(cone, s_, z_);
    if (!scaling) return fail();
    lambda_ = scaling->apply(z_);

    kkt_.assemble(problem.G, *scaling, reg);
    ++factorization_count_;
    if (!kkt_.factor()) return fail();

    // Affine (predictor) direction: drive s o z toward 0 with full residuals.
    rhs_z_ = -r_primal_ + s_;
    kkt_.solve(-r_dual_, rhs_z_, dx_, dz_);
    ds_ = -r_primal_ - problem.G * dx_;

    const double alpha_aff =
        std::min({1.0, step_to_boundary(cone, s_, ds_), step_to_boundary(cone, z_, dz_)});
    const double mu = sz / nu;
    const double mu_aff =
        (s_ + alpha_aff * ds_).dot(z_ + alpha_aff * dz_) / nu;
    const double sigma =
        std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Combined (corrector) direction with the Mehrotra second-order term.
    d_target_ = -cone_product(cone, lambda_, lambda_) -
                cone_product(cone, scaling->apply_inverse(ds_), scaling->apply(dz_)) +
                sigma * mu * e;
    rhs_z_ = -r_primal_ - scaling->apply(cone_divide(cone, d_target_, lambda_));
    kkt_.solve(-r_dual_, rhs_z_, dx_, dz_);
    ds_ = -r_primal_ - problem.G * dx_;

    const double alpha =
        std::min(1.0, settings_.boundary_fraction *
                          std::min(step_to_boundary(cone, s_, ds_),
                                   step_to_boundary(cone, z_, dz_)));
    if (!(alpha > 0) || !std::isfinite(alpha)) return fail();

    x_ += alpha * dx_;
    s_ += alpha * ds_;
    z_ += alpha * dz_;
    if (!x_.allFinite() || !s_.allFinite() || !z_.allFinite()) return fail();
  }

  result.x = x_;
  result.s = s_;
  result.z = z_;
  result.iterations = iter;
  result.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIters;

  // Refactor at the final iterate so downstream differentiation sees the
  // scaling point of the returned (s, z) pair.
  auto final_scaling = nt_scaling(cone, s_, z_);
  if (final_scaling) {
    auto kkt_final = std::make_shared<KktSystem>();
    kkt_final->assemble(problem.G, *final_scaling, reg);
    ++factorization_count_;
    if (kkt_final->factor()) {
      result.kkt_factorization = std::move(kkt_final);
    }
  }
  if (!result.kkt_factorization && kkt_.factored()) {
    result.kkt_factorization = std::make_shared<KktSystem>(kkt_);
  }
  return result;
}

SolveResult solve(const ProblemData& problem, const SolverSettings& settings) {
  Solver solver(settings);
  return solver.solve(problem);
}

}  // namespace dcol
