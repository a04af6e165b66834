#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dcol/shapes.hpp"
#include "dcol/solver.hpp"

namespace dcol {

/// One body's scaled-membership constraints in h - G v in K form over the
/// local variables v = (x in R^3, alpha, slacks). Orthant rows lead,
/// followed by the SOC blocks in order.
struct ConstraintBlock {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Index orthant_rows = 0;
  std::vector<Index> soc_dims;
  Index slack_count = 0;

  Index rows() const { return G.rows(); }
  Index cols() const { return G.cols(); }
};

ConstraintBlock constraint_block(const Shape& shape, const Pose& pose);

/// Column/row provenance of an assembled pair problem, attributing slack
/// columns and constraint rows to each body so duals can be mapped back.
struct VariableMap {
  static constexpr Index x_col = 0;      // columns 0..2
  static constexpr Index alpha_col = 3;  // objective column
  static constexpr Index alpha_row = 0;  // the alpha >= 0 orthant row

  struct Body {
    Index slack_col = 0;  // first slack column (meaningful when slack_count > 0)
    Index slack_count = 0;
    Index orthant_row = 0;  // first orthant row
    Index orthant_count = 0;
    Index soc_row = 0;  // first SOC row
    Index soc_count = 0;  // total SOC row count
  };

  Index num_vars = 0;
  Index num_rows = 0;
  std::array<Body, 2> bodies;
};

/// Assembles the minimum-scaling problem for a body pair: variables
/// (x, alpha, slacks of body 1, slacks of body 2), objective alpha, rows
/// [alpha >= 0; body-1 orthant; body-2 orthant; body-1 SOCs; body-2 SOCs].
std::pair<ProblemData, VariableMap> assemble_pair(const Shape& shape1, const Pose& pose1,
                                                  const Shape& shape2, const Pose& pose2);

/// Partial derivatives of one body's constraint block with respect to its
/// own pose parameters: entries 0..2 differentiate against the position,
/// 3..6 against the raw quaternion.
struct BlockJacobian {
  std::array<Eigen::MatrixXd, 7> dG;
  std::array<Eigen::VectorXd, 7> dh;
};

BlockJacobian constraint_block_jacobian(const Shape& shape, const Pose& pose);

}  // namespace dcol
