#include "dcol/cones.hpp"

#include <cmath>
#include <stdexcept>

namespace dcol {

namespace {

void check_dim(const ConeSpec& spec, const ConeVec& v, const char* op) {
  if (v.size() != spec.dim()) {
    throw std::invalid_argument(std::string(op) + ": vector length " +
                                std::to_string(v.size()) + " does not match cone dimension " +
                                std::to_string(spec.dim()));
  }
}

}  // namespace

ConeSpec::ConeSpec(Index orthant_dim, std::vector<Index> soc_dims)
    : orthant_dim_(orthant_dim), soc_dims_(std::move(soc_dims)) {
  if (orthant_dim_ < 0) {
    throw std::invalid_argument("ConeSpec: orthant dimension must be nonnegative");
  }
  dim_ = orthant_dim_;
  for (Index d : soc_dims_) {
    // 1-dimensional second-order cones are orthant rows; callers fold them
    // into orthant_dim so the degree count stays unambiguous.
    if (d < 2) {
      throw std::invalid_argument("ConeSpec: second-order cone dimensions must be >= 2");
    }
    dim_ += d;
  }
}

bool contains(const ConeSpec& spec, const ConeVec& v, double tol) {
  check_dim(spec, v, "contains");
  if (tol < 0) throw std::invalid_argument("contains: tol must be >= 0");
  const Index p = spec.orthant_dim();
  if (p > 0 && v.head(p).minCoeff() < -tol) return false;
  Index at = p;
  for (Index d : spec.soc_dims()) {
    if (v.segment(at + 1, d - 1).norm() > v(at) + tol) return false;
    at += d;
  }
  return true;
}

ConeVec cone_product(const ConeSpec& spec, const ConeVec& u, const ConeVec& v) {
  check_dim(spec, u, "cone_product");
  check_dim(spec, v, "cone_product");
  ConeVec out(spec.dim());
  const Index p = spec.orthant_dim();
  out.head(p) = u.head(p).cwiseProduct(v.head(p));
  Index at = p;
  for (Index d : spec.soc_dims()) {
    const auto u_tail = u.segment(at + 1, d - 1);
    const auto v_tail = v.segment(at + 1, d - 1);
    out(at) = u.segment(at, d).dot(v.segment(at, d));
    out.segment(at + 1, d - 1) = u(at) * v_tail + v(at) * u_tail;
    at += d;
  }
  return out;
}

ConeVec cone_divide(const ConeSpec& spec, const ConeVec& w, const ConeVec& u) {
  check_dim(spec, w, "cone_divide");
  check_dim(spec, u, "cone_divide");
  ConeVec out(spec.dim());
  const Index p = spec.orthant_dim();
  out.head(p) = w.head(p).cwiseQuotient(u.head(p));
  Index at = p;
  for (Index d : spec.soc_dims()) {
    const auto u_tail = u.segment(at + 1, d - 1);
    const auto w_tail = w.segment(at + 1, d - 1);
    const double det = u(at) * u(at) - u_tail.squaredNorm();
    const double x0 = (u(at) * w(at) - u_tail.dot(w_tail)) / det;
    out(at) = x0;
    out.segment(at + 1, d - 1) = (w_tail - x0 * u_tail) / u(at);
    at += d;
  }
  return out;
}

ConeVec identity(const ConeSpec& spec) {
  ConeVec e = ConeVec::Zero(spec.dim());
  e.head(spec.orthant_dim()).setOnes();
  Index at = spec.orthant_dim();
  for (Index d : spec.soc_dims()) {
    e(at) = 1.0;
    at += d;
  }
  return e;
}

double max_step(const ConeSpec& spec, const ConeVec& v) {
  check_dim(spec, v, "max_step");
  double t = kInfinity;
  const Index p = spec.orthant_dim();
  for (Index i = 0; i < p; ++i) {
    if (v(i) < 0) t = std::min(t, -1.0 / v(i));
  }
  Index at = p;
  for (Index d : spec.soc_dims()) {
    // Boundary of ||t v_tail|| <= 1 + t v0.
    const double tail = v.segment(at + 1, d - 1).norm();
    if (tail > v(at)) t = std::min(t, 1.0 / (tail - v(at)));
    at += d;
  }
  return t;
}

double interior_shift(const ConeSpec& spec, const ConeVec& v) {
  check_dim(spec, v, "interior_shift");
  double shift = -kInfinity;
  const Index p = spec.orthant_dim();
  if (p > 0) shift = std::max(shift, -v.head(p).minCoeff());
  Index at = p;
  for (Index d : spec.soc_dims()) {
    shift = std::max(shift, v.segment(at + 1, d - 1).norm() - v(at));
    at += d;
  }
  return shift;
}

namespace {

// Smallest positive root of a*t^2 + b*t + c = 0 with c > 0, or +inf.
double smallest_positive_root(double a, double b, double c) {
  if (a == 0.0) {
    return b < 0 ? -c / b : kInfinity;
  }
  const double disc = b * b - 4.0 * a * c;
  if (a < 0) {
    // Concave with q(0) = c > 0: exactly one positive crossing.
    return (-b - std::sqrt(disc)) / (2.0 * a);
  }
  if (disc < 0) return kInfinity;
  // Cancellation-free pairing: r1*r2 = c/a, r1 + r2 = -b/a.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  const double r1 = q / a;
  const double r2 = q != 0.0 ? c / q : kInfinity;
  double t = kInfinity;
  if (r1 > 0) t = std::min(t, r1);
  if (r2 > 0) t = std::min(t, r2);
  return t;
}

}  // namespace

double step_to_boundary(const ConeSpec& spec, const ConeVec& u, const ConeVec& dv) {
  check_dim(spec, u, "step_to_boundary");
  check_dim(spec, dv, "step_to_boundary");
  double t = kInfinity;
  const Index p = spec.orthant_dim();
  for (Index i = 0; i < p; ++i) {
    if (dv(i) < 0) t = std::min(t, -u(i) / dv(i));
  }
  Index at = p;
  for (Index d : spec.soc_dims()) {
    const auto u_tail = u.segment(at + 1, d - 1);
    const auto d_tail = dv.segment(at + 1, d - 1);
    // (u0 + t d0)^2 - ||u_tail + t d_tail||^2 = 0, positive at t = 0.
    const double a = dv(at) * dv(at) - d_tail.squaredNorm();
    const double b = 2.0 * (u(at) * dv(at) - u_tail.dot(d_tail));
    const double c = u(at) * u(at) - u_tail.squaredNorm();
    t = std::min(t, smallest_positive_root(a, b, c));
    at += d;
  }
  return t;
}

ScalingBlocks ScalingBlocks::identity(const ConeSpec& spec) {
  ScalingBlocks w(spec);
  w.orthant_w_ = Eigen::VectorXd::Ones(spec.orthant_dim());
  for (Index d : spec.soc_dims()) {
    w.soc_.push_back({1.0, 1.0, Eigen::VectorXd::Zero(d - 1)});
  }
  return w;
}

std::optional<ScalingBlocks> nt_scaling(const ConeSpec& spec, const ConeVec& s,
                                        const ConeVec& z) {
  check_dim(spec, s, "nt_scaling");
  check_dim(spec, z, "nt_scaling");
  ScalingBlocks w(spec);
  const Index p = spec.orthant_dim();
  w.orthant_w_.resize(p);
  for (Index i = 0; i < p; ++i) {
    if (s(i) <= 0 || z(i) <= 0) return std::nullopt;
    w.orthant_w_(i) = std::sqrt(s(i) / z(i));
  }
  w.soc_.reserve(spec.soc_dims().size());
  Index at = p;
  for (Index d : spec.soc_dims()) {
    const auto sk = s.segment(at, d);
    const auto zk = z.segment(at, d);
    const double sres = sk(0) * sk(0) - sk.tail(d - 1).squaredNorm();
    const double zres = zk(0) * zk(0) - zk.tail(d - 1).squaredNorm();
    if (sres <= 0 || zres <= 0 || sk(0) <= 0 || zk(0) <= 0) return std::nullopt;
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);

    const Eigen::VectorXd sbar = sk / snorm;
    const Eigen::VectorXd zbar = zk / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));

    ScalingBlocks::SocBlock blk;
    blk.eta = std::sqrt(snorm / znorm);
    blk.w0 = (0.5 / gamma) * (sbar(0) + zbar(0));
    blk.wbar = (0.5 / gamma) * (sbar.tail(d - 1) - zbar.tail(d - 1));
    w.soc_.push_back(std::move(blk));
    at += d;
  }
  return w;
}

ConeVec ScalingBlocks::apply(const ConeVec& v) const {
  check_dim(spec_, v, "ScalingBlocks::apply");
  ConeVec out(spec_.dim());
  const Index p = spec_.orthant_dim();
  out.head(p) = orthant_w_.cwiseProduct(v.head(p));
  Index at = p;
  for (const SocBlock& blk : soc_) {
    const Index d = blk.wbar.size() + 1;
    const auto v_tail = v.segment(at + 1, d - 1);
    const double zeta = blk.wbar.dot(v_tail);
    out(at) = blk.eta * (blk.w0 * v(at) + zeta);
    out.segment(at + 1, d - 1) =
        blk.eta * (v_tail + (v(at) + zeta / (1.0 + blk.w0)) * blk.wbar);
    at += d;
  }
  return out;
}

ConeVec ScalingBlocks::apply_inverse(const ConeVec& v) const {
  check_dim(spec_, v, "ScalingBlocks::apply_inverse");
  ConeVec out(spec_.dim());
  const Index p = spec_.orthant_dim();
  out.head(p) = v.head(p).cwiseQuotient(orthant_w_);
  Index at = p;
  for (const SocBlock& blk : soc_) {
    const Index d = blk.wbar.size() + 1;
    const auto v_tail = v.segment(at + 1, d - 1);
    const double zeta = blk.wbar.dot(v_tail);
    // W^-1 = J W J / eta^2 applied through the factored form.
    out(at) = (blk.w0 * v(at) - zeta) / blk.eta;
    out.segment(at + 1, d - 1) =
        (v_tail + (-v(at) + zeta / (1.0 + blk.w0)) * blk.wbar) / blk.eta;
    at += d;
  }
  return out;
}

void ScalingBlocks::subtract_gram(Eigen::Ref<Eigen::MatrixXd> block) const {
  const Index m = spec_.dim();
  if (block.rows() != m || block.cols() != m) {
    throw std::invalid_argument("ScalingBlocks::subtract_gram: block size mismatch");
  }
  const Index p = spec_.orthant_dim();
  for (Index i = 0; i < p; ++i) {
    block(i, i) -= orthant_w_(i) * orthant_w_(i);
  }
  Index at = p;
  for (const SocBlock& blk : soc_) {
    const Index d = blk.wbar.size() + 1;
    // W^2 = eta^2 (2 w w' - J) with w = (w0, wbar), J = diag(1, -I).
    const double e2 = blk.eta * blk.eta;
    Eigen::VectorXd wv(d);
    wv(0) = blk.w0;
    wv.tail(d - 1) = blk.wbar;
    block.block(at, at, d, d) -= e2 * (2.0 * wv * wv.transpose());
    block(at, at) += e2;
    for (Index i = 1; i < d; ++i) block(at + i, at + i) -= e2;
    at += d;
  }
}

}  // namespace dcol
