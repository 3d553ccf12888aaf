#include "netdyad/regression.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "netdyad/error.hpp"

namespace netdyad {

void RegressionData::validate() const {
  const auto m = y.size();
  if (X.rows() != m) {
    throw ValidationError("design matrix has " + std::to_string(X.rows()) +
                          " rows but outcome has " + std::to_string(m));
  }
  if (static_cast<Eigen::Index>(dyad_ids.size()) != m) {
    throw ValidationError("dyad id vector length does not match outcome");
  }
  if (group_ids && static_cast<Eigen::Index>(group_ids->size()) != m) {
    throw ValidationError("group id vector length does not match outcome");
  }
  if (!column_names.empty() &&
      static_cast<Eigen::Index>(column_names.size()) != X.cols()) {
    throw ValidationError("column name count does not match design matrix");
  }
  if (!y.allFinite()) throw ValidationError("outcome contains non-finite values");
  if (!X.allFinite()) throw ValidationError("design matrix contains non-finite values");
}

Eigen::MatrixXd OlsFit::scores_by_dyad(std::size_t n_dyads) const {
  const auto k = data.X.cols();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_dyads), k);
  std::vector<char> seen(n_dyads, 0);
  if (data.rows() != n_dyads) {
    throw ValidationError("fit has " + std::to_string(data.rows()) +
                          " rows but the dyad network has " +
                          std::to_string(n_dyads) + " dyads");
  }
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const DyadId m = data.dyad_ids[r];
    if (m >= n_dyads || seen[m]) {
      throw ValidationError("row " + std::to_string(r) + " has dyad id " +
                            std::to_string(m) +
                            " that is out of range or repeated");
    }
    seen[m] = 1;
    const auto ri = static_cast<Eigen::Index>(r);
    u.row(m) = residuals(ri) * data.X.row(ri);
  }
  return u;
}

OlsFit ols_fit(const RegressionData& data, const OlsOptions& options) {
  data.validate();
  const auto m = data.X.rows();
  const auto k = data.X.cols();
  if (k == 0) throw ValidationError("design matrix has no columns");
  if (m < k) {
    throw ValidationError("need at least as many rows (" + std::to_string(m) +
                          ") as regressors (" + std::to_string(k) + ")");
  }

  const Eigen::MatrixXd xtx = data.X.transpose() * data.X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double lmin = lambda(0);
  const double lmax = lambda(k - 1);
  if (!(lmin > 0.0) || lmax / lmin > options.max_condition) {
    std::ostringstream msg;
    msg << "design matrix is rank deficient or ill-conditioned: smallest "
           "singular value "
        << std::sqrt(std::max(lmin, 0.0)) << ", largest "
        << std::sqrt(std::max(lmax, 0.0)) << " (condition bound "
        << options.max_condition << " on X'X)";
    throw NumericalError(msg.str());
  }

  OlsFit fit;
  fit.beta = data.X.colPivHouseholderQr().solve(data.y);
  fit.residuals = data.y - data.X * fit.beta;
  fit.bread = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
              eig.eigenvectors().transpose();
  fit.bread = 0.5 * (fit.bread + fit.bread.transpose()).eval();
  fit.data = data;
  return fit;
}

RegressionData with_intercept(const RegressionData& data) {
  RegressionData out = data;
  if (data.has_intercept) return out;
  out.X.resize(data.X.rows(), data.X.cols() + 1);
  out.X.col(0).setOnes();
  out.X.rightCols(data.X.cols()) = data.X;
  if (!data.column_names.empty() || data.X.cols() == 0) {
    out.column_names.insert(out.column_names.begin(), "intercept");
  }
  out.has_intercept = true;
  return out;
}

RegressionData within_demean(const RegressionData& data) {
  data.validate();
  if (!data.group_ids) {
    throw ValidationError("within_demean requires group ids");
  }
  const auto& groups = *data.group_ids;
  const auto m = static_cast<Eigen::Index>(data.rows());

  std::map<std::int64_t, std::size_t> slot_of;
  std::vector<std::size_t> slot(groups.size());
  for (std::size_t r = 0; r < groups.size(); ++r) {
    slot[r] = slot_of.try_emplace(groups[r], slot_of.size()).first->second;
  }
  const auto g = static_cast<Eigen::Index>(slot_of.size());

  const Eigen::Index first = data.has_intercept ? 1 : 0;
  const Eigen::Index kept = data.X.cols() - first;

  Eigen::MatrixXd all(m, kept + 1);
  all.col(0) = data.y;
  all.rightCols(kept) = data.X.rightCols(kept);

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g, kept + 1);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(g);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto s = static_cast<Eigen::Index>(slot[r]);
    sums.row(s) += all.row(r);
    counts(s) += 1.0;
  }
  for (Eigen::Index s = 0; s < g; ++s) sums.row(s) /= counts(s);
  for (Eigen::Index r = 0; r < m; ++r) {
    all.row(r) -= sums.row(static_cast<Eigen::Index>(slot[r]));
  }

  RegressionData out;
  out.y = all.col(0);
  out.X = all.rightCols(kept);
  out.dyad_ids = data.dyad_ids;
  if (!data.column_names.empty()) {
    out.column_names.assign(data.column_names.begin() + first,
                            data.column_names.end());
  }
  out.has_intercept = false;
  out.group_ids = data.group_ids;
  return out;
}

}  // namespace netdyad
