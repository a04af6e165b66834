#pragma once

#include <Eigen/Core>

#include <array>
#include <variant>

namespace dcol {

using Index = Eigen::Index;

/// Rigid-body pose: world-frame position and orientation quaternion in
/// (w, x, y, z) order. Checked construction requires a unit quaternion;
/// derivative and finite-difference paths build unchecked poses because
/// the rotation formula is evaluated at arbitrary q.
struct Pose {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  Eigen::Vector4d quaternion{1.0, 0.0, 0.0, 0.0};

  Pose() = default;
  Pose(const Eigen::Vector3d& r, const Eigen::Vector4d& q);

  static Pose unchecked(const Eigen::Vector3d& r, const Eigen::Vector4d& q) {
    Pose p;
    p.position = r;
    p.quaternion = q;
    return p;
  }
};

/// Homogeneous quaternion-to-rotation formula, quadratic in the four raw
/// parameters. A proper rotation at |q| = 1; at other q it scales lengths
/// by |q|^2, which keeps the formula smooth for differentiation.
Eigen::Matrix3d rotation(const Eigen::Vector4d& q);

/// Partial derivatives of rotation(q) with respect to each of the four raw
/// quaternion parameters (the formula is quadratic, so these are linear).
std::array<Eigen::Matrix3d, 4> rotation_jacobian(const Eigen::Vector4d& q);

/// Body-frame halfspaces A w <= b, bounded with the origin strictly
/// interior (b > 0 elementwise and the rows of A positively span R^3).
struct Polytope {
  Eigen::Matrix<double, Eigen::Dynamic, 3> A;
  Eigen::VectorXd b;

  Polytope(Eigen::Matrix<double, Eigen::Dynamic, 3> A_in, Eigen::VectorXd b_in);
};

/// Points within radius R of a segment of length L along the body x axis.
struct Capsule {
  double radius;
  double length;

  Capsule(double R, double L);
};

/// Capsule constraints plus two scaled halfspaces for the flat ends.
struct Cylinder {
  double radius;
  double length;

  Cylinder(double R, double L);
};

/// Height H, half angle beta; the body origin sits one quarter of the way
/// from the flat face to the tip.
struct Cone {
  double height;
  double half_angle;

  Cone(double H, double beta);
};

/// x'Px <= 1 with P = U'U; U is the upper-triangular Cholesky factor.
struct Ellipsoid {
  Eigen::Matrix3d U;

  explicit Ellipsoid(const Eigen::Matrix3d& U_in);
};

/// Points within radius R of the planar polygon {y in R^2 : C y <= d},
/// embedded on the body frame's first two basis vectors.
struct PaddedPolygon {
  Eigen::Matrix<double, Eigen::Dynamic, 2> C;
  Eigen::VectorXd d;
  double radius;

  PaddedPolygon(Eigen::Matrix<double, Eigen::Dynamic, 2> C_in, Eigen::VectorXd d_in,
                double R);
};

using Shape = std::variant<Polytope, Capsule, Cylinder, Cone, Ellipsoid, PaddedPolygon>;

/// A sphere is an ellipsoid with U = I / R.
Ellipsoid sphere(double radius);

/// Number of extra scalar variables the shape's conic description carries
/// (0, 1 for the capsule/cylinder axis coordinate, 2 for the polygon plane
/// coordinates).
Index shape_slack_count(const Shape& shape);

const char* shape_name(const Shape& shape);

}  // namespace dcol
