#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dcol/assembly.hpp"
#include "dcol/shapes.hpp"

namespace dcol {

Pose::Pose(const Eigen::Vector3d& r, const Eigen::Vector4d& q)
    : position(r), quaternion(q) {
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("Pose: quaternion must be unit length within 1e-9");
  }
}

Eigen::Matrix3d rotation(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d Q;
  Q << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return Q;
}

std::array<Eigen::Matrix3d, 4> rotation_jacobian(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  std::array<Eigen::Matrix3d, 4> d;
  d[0] << w, -z, y,
          z, w, -x,
          -y, x, w;
  d[1] << x, y, z,
          y, -x, -w,
          z, w, -x;
  d[2] << -y, x, w,
          x, y, z,
          -w, z, -y;
  d[3] << -z, -w, x,
          w, -z, y,
          x, y, z;
  for (auto& m : d) m *= 2.0;
  return d;
}

namespace {

// {w : Aw <= 0} == {0}: rank 3 and no pairwise edge direction stays inside.
bool positively_spans(const Eigen::Matrix<double, Eigen::Dynamic, 3>& A) {
  const Index m = A.rows();
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).rank() < 3) return false;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      Eigen::Vector3d ray = Eigen::Vector3d(A.row(i)).cross(Eigen::Vector3d(A.row(j)));
      const double norm = ray.norm();
      if (norm < 1e-12) continue;
      ray /= norm;
      if ((A * ray).maxCoeff() < 1e-10) return false;
      if ((A * (-ray)).maxCoeff() < 1e-10) return false;
    }
  }
  return true;
}

bool positively_spans_2d(const Eigen::Matrix<double, Eigen::Dynamic, 2>& C) {
  const Index m = C.rows();
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(C).rank() < 2) return false;
  for (Index i = 0; i < m; ++i) {
    const Eigen::Vector2d row = C.row(i);
    const double norm = row.norm();
    if (norm < 1e-12) return false;
    const Eigen::Vector2d ray = Eigen::Vector2d(-row(1), row(0)) / norm;
    if ((C * ray).maxCoeff() < 1e-10) return false;
    if ((C * (-ray)).maxCoeff() < 1e-10) return false;
  }
  return true;
}

}  // namespace

Polytope::Polytope(Eigen::Matrix<double, Eigen::Dynamic, 3> A_in, Eigen::VectorXd b_in)
    : A(std::move(A_in)), b(std::move(b_in)) {
  if (A.rows() != b.size() || A.rows() == 0) {
    throw std::invalid_argument("Polytope: A and b row counts must match and be nonzero");
  }
  if (b.minCoeff() <= 0.0) {
    throw std::invalid_argument("Polytope: b must be strictly positive (origin interior)");
  }
  if (!positively_spans(A)) {
    throw std::invalid_argument("Polytope: halfspaces do not bound a finite volume");
  }
}

Capsule::Capsule(double R, double L) : radius(R), length(L) {
  if (!(R > 0) || !(L > 0)) throw std::invalid_argument("Capsule: radius and length must be > 0");
}

Cylinder::Cylinder(double R, double L) : radius(R), length(L) {
  if (!(R > 0) || !(L > 0)) throw std::invalid_argument("Cylinder: radius and length must be > 0");
}

Cone::Cone(double H, double beta) : height(H), half_angle(beta) {
  if (!(H > 0)) throw std::invalid_argument("Cone: height must be > 0");
  if (!(beta > 0) || !(beta < M_PI / 2)) {
    throw std::invalid_argument("Cone: half angle must lie in (0, pi/2)");
  }
}

Ellipsoid::Ellipsoid(const Eigen::Matrix3d& U_in) : U(U_in) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(U(i, j)) > 1e-14 * (1.0 + U.norm())) {
        throw std::invalid_argument("Ellipsoid: U must be upper triangular");
      }
      U(i, j) = 0.0;
    }
  }
  if (U.diagonal().minCoeff() < 1e-9) {
    throw std::invalid_argument("Ellipsoid: U diagonal must be >= 1e-9");
  }
}

PaddedPolygon::PaddedPolygon(Eigen::Matrix<double, Eigen::Dynamic, 2> C_in,
                             Eigen::VectorXd d_in, double R)
    : C(std::move(C_in)), d(std::move(d_in)), radius(R) {
  if (C.rows() != d.size() || C.rows() == 0) {
    throw std::invalid_argument("PaddedPolygon: C and d row counts must match and be nonzero");
  }
  if (d.minCoeff() <= 0.0) {
    throw std::invalid_argument("PaddedPolygon: d must be strictly positive");
  }
  if (!(R > 0)) throw std::invalid_argument("PaddedPolygon: radius must be > 0");
  if (!positively_spans_2d(C)) {
    throw std::invalid_argument("PaddedPolygon: halfplanes do not bound a finite polygon");
  }
}

Ellipsoid sphere(double radius) {
  if (!(radius > 0)) throw std::invalid_argument("sphere: radius must be > 0");
  return Ellipsoid(Eigen::Matrix3d::Identity() / radius);
}

Index shape_slack_count(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Capsule> || std::is_same_v<T, Cylinder>) {
          return 1;
        } else if constexpr (std::is_same_v<T, PaddedPolygon>) {
          return 2;
        } else {
          return 0;
        }
      },
      shape);
}

const char* shape_name(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Polytope>) return "polytope";
        else if constexpr (std::is_same_v<T, Capsule>) return "capsule";
        else if constexpr (std::is_same_v<T, Cylinder>) return "cylinder";
        else if constexpr (std::is_same_v<T, Cone>) return "cone";
        else if constexpr (std::is_same_v<T, Ellipsoid>) return "ellipsoid";
        else return "padded_polygon";
      },
      shape);
}

namespace {

// Builders for the standard-form blocks. Local variables are
// (x, alpha, slacks); Q is the world rotation and bx = Q e1 the body axis.

ConstraintBlock block_polytope(const Polytope& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Index mh = s.A.rows();
  ConstraintBlock blk;
  blk.orthant_rows = mh;
  blk.slack_count = 0;
  blk.G.setZero(mh, 4);
  blk.G.leftCols<3>() = s.A * Q.transpose();
  blk.G.col(3) = -s.b;
  blk.h = blk.G.leftCols<3>() * pose.position;
  return blk;
}

ConstraintBlock block_capsule(const Capsule& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d bx = Q.col(0);
  ConstraintBlock blk;
  blk.orthant_rows = 2;
  blk.soc_dims = {4};
  blk.slack_count = 1;
  blk.G.setZero(6, 5);
  blk.h.setZero(6);
  // |gamma| <= alpha L/2
  blk.G(0, 3) = -s.length / 2;
  blk.G(0, 4) = 1.0;
  blk.G(1, 3) = -s.length / 2;
  blk.G(1, 4) = -1.0;
  // ||x - r - gamma bx|| <= alpha R
  blk.G(2, 3) = -s.radius;
  blk.G.block<3, 3>(3, 0) = -Eigen::Matrix3d::Identity();
  blk.G.block<3, 1>(3, 4) = bx;
  blk.h.tail<3>() = -pose.position;
  return blk;
}

ConstraintBlock block_cylinder(const Cylinder& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d bx = Q.col(0);
  ConstraintBlock blk;
  blk.orthant_rows = 4;
  blk.soc_dims = {4};
  blk.slack_count = 1;
  blk.G.setZero(8, 5);
  blk.h.setZero(8);
  blk.G(0, 3) = -s.length / 2;
  blk.G(0, 4) = 1.0;
  blk.G(1, 3) = -s.length / 2;
  blk.G(1, 4) = -1.0;
  // Flat ends: |bx'(x - r)| <= alpha L/2.
  blk.G.block<1, 3>(2, 0) = -bx.transpose();
  blk.G(2, 3) = -s.length / 2;
  blk.h(2) = -bx.dot(pose.position);
  blk.G.block<1, 3>(3, 0) = bx.transpose();
  blk.G(3, 3) = -s.length / 2;
  blk.h(3) = bx.dot(pose.position);
  blk.G(4, 3) = -s.radius;
  blk.G.block<3, 3>(5, 0) = -Eigen::Matrix3d::Identity();
  blk.G.block<3, 1>(5, 4) = bx;
  blk.h.tail<3>() = -pose.position;
  return blk;
}

ConstraintBlock block_cone(const Cone& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Vector3d bx = Q.col(0);
  const double tanb = std::tan(s.half_angle);
  const Eigen::Vector3d Ediag(tanb, 1.0, 1.0);
  ConstraintBlock blk;
  blk.orthant_rows = 1;
  blk.soc_dims = {3};
  blk.slack_count = 0;
  blk.G.setZero(4, 4);
  blk.h.setZero(4);
  // Flat face: bx'(x - r) <= alpha H/4.
  blk.G.block<1, 3>(0, 0) = bx.transpose();
  blk.G(0, 3) = -s.height / 4;
  blk.h(0) = bx.dot(pose.position);
  // ||(.)_{2:3}|| <= tan(beta) (.)_1 for E Q'(x - r) + alpha (3H/4) tan(b) e1.
  const Eigen::Matrix3d EQt = Ediag.asDiagonal() * Q.transpose();
  blk.G.block<3, 3>(1, 0) = -EQt;
  blk.G(1, 3) = -(3.0 * s.height / 4.0) * tanb;
  blk.h.tail<3>() = -EQt * pose.position;
  return blk;
}

ConstraintBlock block_ellipsoid(const Ellipsoid& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Eigen::Matrix3d UQt = s.U * Q.transpose();
  ConstraintBlock blk;
  blk.orthant_rows = 0;
  blk.soc_dims = {4};
  blk.slack_count = 0;
  blk.G.setZero(4, 4);
  blk.h.setZero(4);
  blk.G(0, 3) = -1.0;
  blk.G.block<3, 3>(1, 0) = -UQt;
  blk.h.tail<3>() = -UQt * pose.position;
  return blk;
}

ConstraintBlock block_polygon(const PaddedPolygon& s, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const Index mp = s.C.rows();
  ConstraintBlock blk;
  blk.orthant_rows = mp;
  blk.soc_dims = {4};
  blk.slack_count = 2;
  blk.G.setZero(mp + 4, 6);
  blk.h.setZero(mp + 4);
  // C y <= alpha d
  blk.G.block(0, 3, mp, 1) = -s.d;
  blk.G.block(0, 4, mp, 2) = s.C;
  // ||x - r - Q~ y|| <= alpha R
  blk.G(mp, 3) = -s.radius;
  blk.G.block<3, 3>(mp + 1, 0) = -Eigen::Matrix3d::Identity();
  blk.G.block<3, 2>(mp + 1, 4) = Q.leftCols<2>();
  blk.h.tail<3>() = -pose.position;
  return blk;
}

}  // namespace

ConstraintBlock constraint_block(const Shape& shape, const Pose& pose) {
  return std::visit(
      [&pose](const auto& s) -> ConstraintBlock {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Polytope>) return block_polytope(s, pose);
        else if constexpr (std::is_same_v<T, Capsule>) return block_capsule(s, pose);
        else if constexpr (std::is_same_v<T, Cylinder>) return block_cylinder(s, pose);
        else if constexpr (std::is_same_v<T, Cone>) return block_cone(s, pose);
        else if constexpr (std::is_same_v<T, Ellipsoid>) return block_ellipsoid(s, pose);
        else return block_polygon(s, pose);
      },
      shape);
}

std::pair<ProblemData, VariableMap> assemble_pair(const Shape& shape1, const Pose& pose1,
                                                  const Shape& shape2, const Pose& pose2) {
  const ConstraintBlock b1 = constraint_block(shape1, pose1);
  const ConstraintBlock b2 = constraint_block(shape2, pose2);

  VariableMap map;
  map.bodies[0].slack_count = b1.slack_count;
  map.bodies[1].slack_count = b2.slack_count;
  map.bodies[0].slack_col = 4;
  map.bodies[1].slack_col = 4 + b1.slack_count;
  map.num_vars = 4 + b1.slack_count + b2.slack_count;

  const Index orthant_total = 1 + b1.orthant_rows + b2.orthant_rows;
  Index soc1 = 0, soc2 = 0;
  for (Index d : b1.soc_dims) soc1 += d;
  for (Index d : b2.soc_dims) soc2 += d;
  map.num_rows = orthant_total + soc1 + soc2;

  map.bodies[0].orthant_row = 1;
  map.bodies[0].orthant_count = b1.orthant_rows;
  map.bodies[1].orthant_row = 1 + b1.orthant_rows;
  map.bodies[1].orthant_count = b2.orthant_rows;
  map.bodies[0].soc_row = orthant_total;
  map.bodies[0].soc_count = soc1;
  map.bodies[1].soc_row = orthant_total + soc1;
  map.bodies[1].soc_count = soc2;

  std::vector<Index> soc_dims = b1.soc_dims;
  soc_dims.insert(soc_dims.end(), b2.soc_dims.begin(), b2.soc_dims.end());

  ProblemData prob{Eigen::VectorXd::Zero(map.num_vars),
                   Eigen::MatrixXd::Zero(map.num_rows, map.num_vars),
                   Eigen::VectorXd::Zero(map.num_rows),
                   ConeSpec(orthant_total, std::move(soc_dims))};
  prob.c(VariableMap::alpha_col) = 1.0;

  // alpha >= 0
  prob.G(VariableMap::alpha_row, VariableMap::alpha_col) = -1.0;

  const auto scatter = [&prob](const ConstraintBlock& blk, const VariableMap::Body& body) {
    const auto place = [&](Index block_row, Index global_row, Index count) {
      if (count == 0) return;
      prob.G.block(global_row, 0, count, 4) = blk.G.block(block_row, 0, count, 4);
      if (blk.slack_count > 0) {
        prob.G.block(global_row, body.slack_col, count, blk.slack_count) =
            blk.G.block(block_row, 4, count, blk.slack_count);
      }
      prob.h.segment(global_row, count) = blk.h.segment(block_row, count);
    };
    place(0, body.orthant_row, blk.orthant_rows);
    place(blk.orthant_rows, body.soc_row, blk.rows() - blk.orthant_rows);
  };
  scatter(b1, map.bodies[0]);
  scatter(b2, map.bodies[1]);

  return {std::move(prob), map};
}

namespace {

BlockJacobian zero_jacobian(Index rows, Index cols) {
  BlockJacobian j;
  for (int k = 0; k < 7; ++k) {
    j.dG[k].setZero(rows, cols);
    j.dh[k].setZero(rows);
  }
  return j;
}

}  // namespace

BlockJacobian constraint_block_jacobian(const Shape& shape, const Pose& pose) {
  const Eigen::Matrix3d Q = rotation(pose.quaternion);
  const auto dQ = rotation_jacobian(pose.quaternion);
  const Eigen::Vector3d& r = pose.position;

  return std::visit(
      [&](const auto& s) -> BlockJacobian {
        using T = std::decay_t<decltype(s)>;

        if constexpr (std::is_same_v<T, Polytope>) {
          const Index mh = s.A.rows();
          BlockJacobian j = zero_jacobian(mh, 4);
          const Eigen::MatrixXd AQt = s.A * Q.transpose();
          for (int k = 0; k < 3; ++k) j.dh[k] = AQt.col(k);
          for (int k = 0; k < 4; ++k) {
            const Eigen::MatrixXd AdQt = s.A * dQ[k].transpose();
            j.dG[3 + k].leftCols(3) = AdQt;
            j.dh[3 + k] = AdQt * r;
          }
          return j;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          BlockJacobian j = zero_jacobian(6, 5);
          for (int k = 0; k < 3; ++k) j.dh[k](3 + k) = -1.0;
          for (int k = 0; k < 4; ++k) {
            j.dG[3 + k].block(3, 4, 3, 1) = dQ[k].col(0);
          }
          return j;
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          const Eigen::Vector3d bx = Q.col(0);
          BlockJacobian j = zero_jacobian(8, 5);
          for (int k = 0; k < 3; ++k) {
            j.dh[k](2) = -bx(k);
            j.dh[k](3) = bx(k);
            j.dh[k](5 + k) = -1.0;
          }
          for (int k = 0; k < 4; ++k) {
            const Eigen::Vector3d dbx = dQ[k].col(0);
            j.dG[3 + k].block(2, 0, 1, 3) = -dbx.transpose();
            j.dG[3 + k].block(3, 0, 1, 3) = dbx.transpose();
            j.dG[3 + k].block(5, 4, 3, 1) = dbx;
            j.dh[3 + k](2) = -dbx.dot(r);
            j.dh[3 + k](3) = dbx.dot(r);
          }
          return j;
        } else if constexpr (std::is_same_v<T, Cone>) {
          const double tanb = std::tan(s.half_angle);
          const Eigen::Vector3d Ediag(tanb, 1.0, 1.0);
          const Eigen::Matrix3d EQt = Ediag.asDiagonal() * Q.transpose();
          const Eigen::Vector3d bx = Q.col(0);
          BlockJacobian j = zero_jacobian(4, 4);
          for (int k = 0; k < 3; ++k) {
            j.dh[k](0) = bx(k);
            j.dh[k].tail(3) = -EQt.col(k);
          }
          for (int k = 0; k < 4; ++k) {
            const Eigen::Vector3d dbx = dQ[k].col(0);
            const Eigen::Matrix3d EdQt = Ediag.asDiagonal() * dQ[k].transpose();
            j.dG[3 + k].block(0, 0, 1, 3) = dbx.transpose();
            j.dG[3 + k].block(1, 0, 3, 3) = -EdQt;
            j.dh[3 + k](0) = dbx.dot(r);
            j.dh[3 + k].tail(3) = -EdQt * r;
          }
          return j;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          const Eigen::Matrix3d UQt = s.U * Q.transpose();
          BlockJacobian j = zero_jacobian(4, 4);
          for (int k = 0; k < 3; ++k) j.dh[k].tail(3) = -UQt.col(k);
          for (int k = 0; k < 4; ++k) {
            const Eigen::Matrix3d UdQt = s.U * dQ[k].transpose();
            j.dG[3 + k].block(1, 0, 3, 3) = -UdQt;
            j.dh[3 + k].tail(3) = -UdQt * r;
          }
          return j;
        } else {
          const Index mp = s.C.rows();
          BlockJacobian j = zero_jacobian(mp + 4, 6);
          for (int k = 0; k < 3; ++k) j.dh[k](mp + 1 + k) = -1.0;
          for (int k = 0; k < 4; ++k) {
            j.dG[3 + k].block(mp + 1, 4, 3, 2) = dQ[k].leftCols<2>();
          }
          return j;
        }
      },
      shape);
}

}  // namespace dcol
