#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "netdyad/dyad_graph.hpp"

namespace netdyad {

// Outcome, design matrix and row-to-dyad alignment for a dyadic regression.
struct RegressionData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<DyadId> dyad_ids;
  std::vector<std::string> column_names;
  // When set, column 0 of X is an all-ones intercept.
  bool has_intercept = false;
  // Fixed-effect group per row, if any.
  std::optional<std::vector<std::int64_t>> group_ids;

  std::size_t rows() const { return static_cast<std::size_t>(y.size()); }
  std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }

  // Throws ValidationError on shape mismatch or non-finite entries.
  void validate() const;
};

struct OlsOptions {
  // Largest accepted condition number of sum_m x_m x_m'.
  double max_condition = 1e12;
};

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  // (sum_m x_m x_m')^{-1}
  Eigen::MatrixXd bread;
  RegressionData data;

  // Per-dyad scores x_m * residual_m stacked as rows, indexed by dyad id
  // (row m belongs to dyad m). n_dyads is the size of the dyad network.
  Eigen::MatrixXd scores_by_dyad(std::size_t n_dyads) const;
  Eigen::VectorXd fitted() const { return data.X * beta; }
};

// OLS via column-pivoted Householder QR of X. The bread is assembled from
// the symmetric eigendecomposition of X'X, which also supplies the
// condition-number check. Rank deficiency throws NumericalError naming the
// smallest singular value of X.
OlsFit ols_fit(const RegressionData& data, const OlsOptions& options = {});

// Prepends an all-ones column named "intercept".
RegressionData with_intercept(const RegressionData& data);

// Subtracts group means from y and every non-intercept column of X; the
// intercept column is dropped. Requires group_ids.
RegressionData within_demean(const RegressionData& data);

}  // namespace netdyad
