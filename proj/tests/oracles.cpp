#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace dcol::test {

Eigen::MatrixXd dense_scaling(const ScalingBlocks& w) {
  const ConeSpec& spec = w.spec();
  const Index m = spec.dim();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
  const Index p = spec.orthant_dim();
  W.topLeftCorner(p, p) = w.orthant_diag().asDiagonal();
  Index at = p;
  for (const auto& blk : w.soc_blocks()) {
    const Index d = blk.wbar.size() + 1;
    Eigen::MatrixXd Wb(d, d);
    Wb(0, 0) = blk.w0;
    Wb.block(0, 1, 1, d - 1) = blk.wbar.transpose();
    Wb.block(1, 0, d - 1, 1) = blk.wbar;
    Wb.block(1, 1, d - 1, d - 1) =
        Eigen::MatrixXd::Identity(d - 1, d - 1) +
        blk.wbar * blk.wbar.transpose() / (1.0 + blk.w0);
    W.block(at, at, d, d) = blk.eta * Wb;
    at += d;
  }
  return W;
}

Eigen::MatrixXd dense_kkt(const Eigen::MatrixXd& G, const ScalingBlocks& w) {
  const Index m = G.rows();
  const Index n = G.cols();
  const Eigen::MatrixXd W = dense_scaling(w);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topRightCorner(n, m) = G.transpose();
  K.bottomLeftCorner(m, n) = G;
  K.bottomRightCorner(m, m) = -(W.transpose() * W);
  return K;
}

// ---------------------------------------------------------------------------

namespace {

double segment_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

double segment_distance_2d(const Eigen::Vector2d& x, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

}  // namespace

std::vector<Eigen::Vector3d> polytope_vertices(const Polytope& s) {
  std::vector<Eigen::Vector3d> verts;
  const Index m = s.A.rows();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      for (Index k = j + 1; k < m; ++k) {
        Eigen::Matrix3d M;
        M.row(0) = s.A.row(i);
        M.row(1) = s.A.row(j);
        M.row(2) = s.A.row(k);
        if (std::abs(M.determinant()) < 1e-10) continue;
        const Eigen::Vector3d p =
            M.inverse() * Eigen::Vector3d(s.b(i), s.b(j), s.b(k));
        if (((s.A * p - s.b).array() > 1e-8).any()) continue;
        bool dup = false;
        for (const auto& v : verts) {
          if ((v - p).norm() < 1e-8) {
            dup = true;
            break;
          }
        }
        if (!dup) verts.push_back(p);
      }
    }
  }
  return verts;
}

std::vector<Eigen::Vector2d> polygon_vertices(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& C, const Eigen::VectorXd& d) {
  std::vector<Eigen::Vector2d> verts;
  const Index m = C.rows();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      Eigen::Matrix2d M;
      M.row(0) = C.row(i);
      M.row(1) = C.row(j);
      if (std::abs(M.determinant()) < 1e-10) continue;
      const Eigen::Vector2d p = M.inverse() * Eigen::Vector2d(d(i), d(j));
      if (((C * p - d).array() > 1e-8).any()) continue;
      bool dup = false;
      for (const auto& v : verts) {
        if ((v - p).norm() < 1e-8) {
          dup = true;
          break;
        }
      }
      if (!dup) verts.push_back(p);
    }
  }
  // Boundary order (origin is interior since d > 0).
  std::sort(verts.begin(), verts.end(), [](const auto& a, const auto& b) {
    return std::atan2(a(1), a(0)) < std::atan2(b(1), b(0));
  });
  return verts;
}

Eigen::Vector2d project_polygon(const PaddedPolygon& s, double alpha,
                                const Eigen::Vector2d& p) {
  if (((s.C * p - alpha * s.d).array() <= 0).all()) return p;
  const auto verts = polygon_vertices(s.C, s.d);
  double best = kInfinity;
  Eigen::Vector2d y_star = alpha * verts.front();
  for (size_t i = 0; i < verts.size(); ++i) {
    const Eigen::Vector2d a = alpha * verts[i];
    const Eigen::Vector2d b = alpha * verts[(i + 1) % verts.size()];
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Eigen::Vector2d cand = a + t * ab;
    const double dist = (p - cand).norm();
    if (dist < best) {
      best = dist;
      y_star = cand;
    }
  }
  return y_star;
}

Eigen::VectorXd witness_slack(const Shape& shape, const Pose& pose, double alpha,
                              const Eigen::Vector3d& x) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d& r = pose.position;
  return std::visit(
      [&](const auto& s) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Capsule> || std::is_same_v<T, Cylinder>) {
          const double axial = Q.col(0).dot(x - r);
          Eigen::VectorXd g(1);
          g(0) = std::clamp(axial, -alpha * s.length / 2, alpha * s.length / 2);
          return g;
        } else if constexpr (std::is_same_v<T, PaddedPolygon>) {
          const Eigen::Vector2d p = Q.leftCols<2>().transpose() * (x - r);
          return project_polygon(s, alpha, p);
        } else {
          return Eigen::VectorXd(0);
        }
      },
      shape);
}

double violation(const Shape& shape, const Pose& pose, double alpha,
                 const Eigen::Vector3d& x) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d& r = pose.position;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          return (s.A * (Q.transpose() * (x - r)) - alpha * s.b).maxCoeff();
        } else if constexpr (std::is_same_v<T, Capsule>) {
          const Eigen::Vector3d bx = Q.col(0);
          const Eigen::Vector3d a = r - alpha * (s.length / 2) * bx;
          const Eigen::Vector3d b = r + alpha * (s.length / 2) * bx;
          return segment_distance(x, a, b) - alpha * s.radius;
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          const Eigen::Vector3d bx = Q.col(0);
          const double axial = bx.dot(x - r);
          const double radial = ((x - r) - axial * bx).norm();
          return std::max(radial - alpha * s.radius,
                          std::abs(axial) - alpha * s.length / 2);
        } else if constexpr (std::is_same_v<T, Cone>) {
          const Eigen::Vector3d w = Q.transpose() * (x - r);
          const double tanb = std::tan(s.half_angle);
          return std::max(
              w.tail<2>().norm() - tanb * (w(0) + alpha * 3.0 * s.height / 4.0),
              w(0) - alpha * s.height / 4.0);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return (s.U * (Q.transpose() * (x - r))).norm() - alpha;
        } else {
          // Padded polygon: distance from x to the scaled polygon patch.
          const Eigen::Matrix<double, 3, 2> Qt = Q.leftCols<2>();
          const Eigen::Vector2d p = Qt.transpose() * (x - r);
          const Eigen::Vector2d y_star = project_polygon(s, alpha, p);
          const Eigen::Vector3d diff = (x - r) - Qt * y_star;
          return diff.norm() - alpha * s.radius;
        }
      },
      shape);
}

bool member(const Shape& shape, const Pose& pose, double alpha, const Eigen::Vector3d& x,
            double tol) {
  return violation(shape, pose, alpha, x) <= tol;
}

Eigen::AlignedBox3d bounding_box(const Shape& shape, const Pose& pose, double alpha) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d& r = pose.position;
  Eigen::AlignedBox3d box;
  const auto pad = [&box](double amount) {
    box.min().array() -= amount;
    box.max().array() += amount;
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& v : polytope_vertices(s)) {
            box.extend(Eigen::Vector3d(r + alpha * (Q * v)));
          }
        } else if constexpr (std::is_same_v<T, Capsule> || std::is_same_v<T, Cylinder>) {
          const Eigen::Vector3d bx = Q.col(0);
          box.extend(Eigen::Vector3d(r + alpha * (s.length / 2) * bx));
          box.extend(Eigen::Vector3d(r - alpha * (s.length / 2) * bx));
          pad(alpha * s.radius);
        } else if constexpr (std::is_same_v<T, Cone>) {
          const Eigen::Vector3d bx = Q.col(0);
          box.extend(Eigen::Vector3d(r - alpha * (3.0 * s.height / 4.0) * bx));
          const Eigen::Vector3d base = r + alpha * (s.height / 4.0) * bx;
          const double rho = alpha * s.height * std::tan(s.half_angle);
          box.extend(Eigen::Vector3d(base.array() + rho));
          box.extend(Eigen::Vector3d(base.array() - rho));
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          const Eigen::Matrix3d Minv = (s.U * Q.transpose()).inverse();
          for (int i = 0; i < 3; ++i) {
            const double extent = alpha * Minv.row(i).norm();
            Eigen::Vector3d lo = r, hi = r;
            lo(i) -= extent;
            hi(i) += extent;
            box.extend(lo);
            box.extend(hi);
          }
        } else {
          const Eigen::Matrix<double, 3, 2> Qt = Q.leftCols<2>();
          for (const auto& v : polygon_vertices(s.C, s.d)) {
            box.extend(Eigen::Vector3d(r + alpha * (Qt * v)));
          }
          pad(alpha * s.radius);
        }
      },
      shape);
  return box;
}

bool scaled_sets_intersect(const Shape& s1, const Pose& p1, const Shape& s2, const Pose& p2,
                           double alpha) {
  const Eigen::AlignedBox3d box = bounding_box(s1, p1, alpha)
                                      .intersection(bounding_box(s2, p2, alpha));
  if (box.isEmpty()) return false;

  const auto worst = [&](const Eigen::Vector3d& x) {
    return std::max(violation(s1, p1, alpha, x), violation(s2, p2, alpha, x));
  };

  // Multiresolution grid descent on the convex max-violation function.
  constexpr int kGrid = 13;
  Eigen::Vector3d center = box.center();
  Eigen::Vector3d half = 0.5 * box.sizes();
  double best = kInfinity;
  Eigen::Vector3d best_x = center;
  for (int round = 0; round < 6; ++round) {
    for (int ix = 0; ix < kGrid; ++ix) {
      for (int iy = 0; iy < kGrid; ++iy) {
        for (int iz = 0; iz < kGrid; ++iz) {
          const Eigen::Vector3d u(ix / double(kGrid - 1) * 2 - 1,
                                  iy / double(kGrid - 1) * 2 - 1,
                                  iz / double(kGrid - 1) * 2 - 1);
          const Eigen::Vector3d x = center + half.cwiseProduct(u);
          const double f = worst(x);
          if (f < best) {
            best = f;
            best_x = x;
          }
        }
      }
    }
    if (best <= 0.0) return true;
    center = best_x;
    half *= 2.5 / (kGrid - 1) * 2.0;
  }
  return best <= 1e-9;
}

double bisection_alpha(const Shape& s1, const Pose& p1, const Shape& s2, const Pose& p2,
                       double tol) {
  double hi = 1.0;
  int guard = 0;
  while (!scaled_sets_intersect(s1, p1, s2, p2, hi)) {
    hi *= 2.0;
    if (++guard > 30) return kInfinity;
  }
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (scaled_sets_intersect(s1, p1, s2, p2, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

Eigen::Vector4d random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q(i) = normal(rng);
  return q / q.norm();
}

Eigen::Vector4d quat_multiply(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  const double w = a(0) * b(0) - a.tail<3>().dot(b.tail<3>());
  const Eigen::Vector3d v =
      a(0) * b.tail<3>() + b(0) * a.tail<3>() + a.tail<3>().cross(b.tail<3>());
  Eigen::Vector4d out;
  out << w, v;
  return out;
}

Shape random_shape(int kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  switch (kind) {
    case 0: {
      // Rotated box core plus a few random cuts keeps the set bounded and
      // generic.
      const Eigen::Matrix3d R = rotation(random_unit_quaternion(rng));
      const int extra = 2 + int(uni(rng) * 4);
      Eigen::Matrix<double, Eigen::Dynamic, 3> A(6 + extra, 3);
      Eigen::VectorXd b(6 + extra);
      for (int i = 0; i < 3; ++i) {
        A.row(2 * i) = R.col(i).transpose();
        A.row(2 * i + 1) = -R.col(i).transpose();
        b(2 * i) = 0.4 + 0.8 * uni(rng);
        b(2 * i + 1) = 0.4 + 0.8 * uni(rng);
      }
      std::normal_distribution<double> normal;
      for (int i = 0; i < extra; ++i) {
        Eigen::Vector3d n;
        do {
          for (int k = 0; k < 3; ++k) n(k) = normal(rng);
        } while (n.norm() < 1e-3);
        A.row(6 + i) = n.normalized().transpose();
        b(6 + i) = 0.5 + 0.8 * uni(rng);
      }
      return Polytope(A, b);
    }
    case 1:
      return Capsule(0.2 + 0.6 * uni(rng), 0.6 + 1.8 * uni(rng));
    case 2:
      return Cylinder(0.2 + 0.6 * uni(rng), 0.6 + 1.8 * uni(rng));
    case 3:
      return Cone(0.5 + 1.5 * uni(rng), 0.3 + 0.8 * uni(rng));
    case 4: {
      Eigen::Matrix3d U = Eigen::Matrix3d::Zero();
      for (int i = 0; i < 3; ++i) {
        U(i, i) = 0.7 + 1.3 * uni(rng);
        for (int j = i + 1; j < 3; ++j) U(i, j) = 0.4 * (uni(rng) - 0.5);
      }
      return Ellipsoid(U);
    }
    default: {
      const int sides = 3 + int(uni(rng) * 4.999);
      const double phase = uni(rng) * 2 * M_PI;
      Eigen::Matrix<double, Eigen::Dynamic, 2> C(sides, 2);
      Eigen::VectorXd d(sides);
      for (int i = 0; i < sides; ++i) {
        const double th = phase + 2 * M_PI * i / sides;
        C.row(i) << std::cos(th), std::sin(th);
        d(i) = 0.3 + 0.7 * uni(rng);
      }
      return PaddedPolygon(C, d, 0.1 + 0.4 * uni(rng));
    }
  }
}

Pose random_pose(std::mt19937_64& rng, double position_radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::Vector3d dir;
  do {
    for (int i = 0; i < 3; ++i) dir(i) = normal(rng);
  } while (dir.norm() < 1e-6);
  dir.normalize();
  const double radius = position_radius * std::cbrt(uni(rng));
  return Pose(radius * dir, random_unit_quaternion(rng));
}

PoseGradient fd_grad_alpha(const Shape& s1, const Pose& p1, const Shape& s2, const Pose& p2,
                           double step, const SolverSettings& settings) {
  Eigen::Matrix<double, 14, 1> theta;
  theta << p1.position, p1.quaternion, p2.position, p2.quaternion;
  const auto alpha_at = [&](const Eigen::Matrix<double, 14, 1>& t) {
    const Pose a = Pose::unchecked(t.segment<3>(0), t.segment<4>(3));
    const Pose b = Pose::unchecked(t.segment<3>(7), t.segment<4>(10));
    const ProximityResult r = min_scaling(s1, a, s2, b, settings);
    if (!r.optimal()) throw std::runtime_error("fd_grad_alpha: solve failed");
    return r.alpha;
  };
  PoseGradient g;
  for (int k = 0; k < 14; ++k) {
    Eigen::Matrix<double, 14, 1> tp = theta, tm = theta;
    tp(k) += step;
    tm(k) -= step;
    g(k) = (alpha_at(tp) - alpha_at(tm)) / (2 * step);
  }
  return g;
}

double fd_asymmetry(const Shape& s1, const Pose& p1, const Shape& s2, const Pose& p2,
                    double step, const SolverSettings& settings) {
  Eigen::Matrix<double, 14, 1> theta;
  theta << p1.position, p1.quaternion, p2.position, p2.quaternion;
  const auto alpha_at = [&](const Eigen::Matrix<double, 14, 1>& t) {
    const Pose a = Pose::unchecked(t.segment<3>(0), t.segment<4>(3));
    const Pose b = Pose::unchecked(t.segment<3>(7), t.segment<4>(10));
    const ProximityResult r = min_scaling(s1, a, s2, b, settings);
    if (!r.optimal()) throw std::runtime_error("fd_asymmetry: solve failed");
    return r.alpha;
  };
  const double base = alpha_at(theta);
  double worst = 0.0;
  for (int k = 0; k < 14; ++k) {
    Eigen::Matrix<double, 14, 1> tp = theta, tm = theta;
    tp(k) += step;
    tm(k) -= step;
    const double fwd = (alpha_at(tp) - base) / step;
    const double bwd = (base - alpha_at(tm)) / step;
    const double scale = std::max({1.0, std::abs(fwd), std::abs(bwd)});
    worst = std::max(worst, std::abs(fwd - bwd) / scale);
  }
  return worst;
}

}  // namespace dcol::test
