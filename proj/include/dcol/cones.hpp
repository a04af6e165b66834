#pragma once

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <vector>

namespace dcol {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;

/// A vector partitioned by a ConeSpec: orthant slice first, then each
/// second-order-cone slice in order.
using ConeVec = Eigen::VectorXd;

/// Cartesian product of a nonnegative orthant and an ordered list of
/// second-order cones. Both cone families are self-dual, so the same spec
/// describes the dual cone.
class ConeSpec {
 public:
  ConeSpec(Index orthant_dim, std::vector<Index> soc_dims);

  Index orthant_dim() const { return orthant_dim_; }
  const std::vector<Index>& soc_dims() const { return soc_dims_; }

  /// Total dimension m = orthant_dim + sum of SOC dimensions.
  Index dim() const { return dim_; }

  /// Cone degree: orthant dimension plus the number of second-order cones.
  /// Normalizes the complementarity gap.
  Index degree() const { return orthant_dim_ + static_cast<Index>(soc_dims_.size()); }

  bool operator==(const ConeSpec& other) const = default;

 private:
  Index orthant_dim_;
  std::vector<Index> soc_dims_;
  Index dim_;
};

/// True iff v lies in the cone within tol: every orthant entry >= -tol and,
/// for each SOC slice, ||v_tail||_2 <= v_head + tol.
bool contains(const ConeSpec& spec, const ConeVec& v, double tol);

/// Jordan product u o v: elementwise on the orthant slice,
/// [u'v; u0*v_tail + v0*u_tail] on each SOC slice.
ConeVec cone_product(const ConeSpec& spec, const ConeVec& u, const ConeVec& v);

/// Solve u o x = w for x (u must be invertible: nonzero orthant entries,
/// SOC slices off the boundary cone u0^2 != ||u_tail||^2).
ConeVec cone_divide(const ConeSpec& spec, const ConeVec& w, const ConeVec& u);

/// The unit element e with e o v = v: ones on the orthant slice,
/// (1, 0, ..., 0) on each SOC slice.
ConeVec identity(const ConeSpec& spec);

/// sup{ t >= 0 : e + t*v in K }, as the per-cone minimum ratio.
/// Returns +inf when v is already in the cone.
double max_step(const ConeSpec& spec, const ConeVec& v);

/// inf{ t : v + t*e in K }. Negative iff v is strictly interior; used to
/// shift initial iterates into the cone.
double interior_shift(const ConeSpec& spec, const ConeVec& v);

/// sup{ t >= 0 : u + t*dv in K } for strictly interior u. Equals
/// max_step(spec, dv) at u = identity(spec).
double step_to_boundary(const ConeSpec& spec, const ConeVec& u, const ConeVec& dv);

/// Nesterov-Todd scaling point W for an interior pair (s, z), in factored
/// per-cone form so every application costs O(dim).
///
/// Convention: W is symmetric, lambda = W z = W^-T s, and the orthant block
/// of W is diag(sqrt(s/z)). SOC blocks are stored as a scalar eta and a unit
/// hyperbolic vector (w0, wbar) with w0^2 - |wbar|^2 = 1, representing
/// W = eta * [w0, wbar'; wbar, I + wbar wbar'/(1 + w0)].
class ScalingBlocks {
 public:
  struct SocBlock {
    double eta;
    double w0;
    Eigen::VectorXd wbar;
  };

  static ScalingBlocks identity(const ConeSpec& spec);

  /// W v
  ConeVec apply(const ConeVec& v) const;
  /// W^-1 v (= W^-T v; W is symmetric)
  ConeVec apply_inverse(const ConeVec& v) const;

  /// Subtracts W'W from the given square block (used to place the -W'W
  /// block of the reduced Newton system). block must be dim() x dim().
  void subtract_gram(Eigen::Ref<Eigen::MatrixXd> block) const;

  const ConeSpec& spec() const { return spec_; }
  const Eigen::VectorXd& orthant_diag() const { return orthant_w_; }
  const std::vector<SocBlock>& soc_blocks() const { return soc_; }

 private:
  friend std::optional<ScalingBlocks> nt_scaling(const ConeSpec&, const ConeVec&,
                                                 const ConeVec&);
  explicit ScalingBlocks(ConeSpec spec) : spec_(std::move(spec)) {}

  ConeSpec spec_;
  Eigen::VectorXd orthant_w_;
  std::vector<SocBlock> soc_;
};

/// Computes the NT scaling for a strictly interior pair (s, z).
/// Returns nullopt when either vector is not strictly interior.
std::optional<ScalingBlocks> nt_scaling(const ConeSpec& spec, const ConeVec& s,
                                        const ConeVec& z);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace dcol
