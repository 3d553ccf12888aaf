#include "netdyad/variance.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

#include "netdyad/error.hpp"
#include "netdyad/parallel.hpp"

namespace netdyad {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

Eigen::MatrixXd sandwich(const Eigen::MatrixXd& bread,
                         const Eigen::MatrixXd& meat) {
  Eigen::MatrixXd v = bread * meat * bread;
  return 0.5 * (v + v.transpose());
}

// meat = U' G where G.row(m) is the weighted sum of scores around dyad m.
Eigen::MatrixXd meat_from(const Eigen::MatrixXd& u, const Eigen::MatrixXd& g) {
  Eigen::MatrixXd meat = u.transpose() * g;
  return 0.5 * (meat + meat.transpose());
}

}  // namespace

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "ehw") return EstimatorKind::kEhw;
  if (name == "dyadic") return EstimatorKind::kDyadic;
  if (name == "network") return EstimatorKind::kNetwork;
  throw ValidationError("unknown estimator '" + name +
                        "' (expected ehw, dyadic or network)");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kEhw: return "ehw";
    case EstimatorKind::kDyadic: return "dyadic";
    case EstimatorKind::kNetwork: return "network";
  }
  return "?";
}

Kernel Kernel::parse(const std::string& name) {
  if (name == "rectangular") return Kernel(KernelKind::kRectangular);
  if (name == "bartlett") return Kernel(KernelKind::kBartlett);
  throw ValidationError("unknown kernel '" + name +
                        "' (expected rectangular or bartlett)");
}

std::string Kernel::name() const {
  return kind_ == KernelKind::kRectangular ? "rectangular" : "bartlett";
}

double Kernel::operator()(double z) const {
  const double a = std::abs(z);
  if (!(a <= 1.0)) return 0.0;
  return kind_ == KernelKind::kRectangular ? 1.0 : 1.0 - a;
}

VarianceEstimate ehw_variance(const OlsFit& fit) {
  const auto& x = fit.data.X;
  const Eigen::MatrixXd u = x.array().colwise() * fit.residuals.array();
  VarianceEstimate v;
  v.kind = EstimatorKind::kEhw;
  v.matrix = sandwich(fit.bread, meat_from(u, u));
  return v;
}

VarianceEstimate dyadic_robust_variance(const OlsFit& fit,
                                        const DyadNetwork& net) {
  const Eigen::MatrixXd u = fit.scores_by_dyad(net.size());
  // Same association order as the shell-wise path, so that the network
  // estimator at bandwidth 1 reproduces this one bit for bit.
  Eigen::MatrixXd g(u.rows(), u.cols());
  Eigen::RowVectorXd adjacent_sum(u.cols());
  for (DyadId m = 0; m < net.size(); ++m) {
    adjacent_sum.setZero();
    for (DyadId nb : net.neighbors(m)) adjacent_sum += u.row(nb);
    g.row(m) = u.row(m) + adjacent_sum;
  }
  VarianceEstimate v;
  v.kind = EstimatorKind::kDyadic;
  v.matrix = sandwich(fit.bread, meat_from(u, g));
  return v;
}

VarianceEstimate network_hac_variance(const OlsFit& fit,
                                      const DyadNetwork& net,
                                      const Kernel& kernel, double bandwidth,
                                      const VarianceOptions& options) {
  if (!std::isfinite(bandwidth)) {
    throw ValidationError("bandwidth must be finite");
  }
  if (!(bandwidth > 0.0)) throw ValidationError("bandwidth must be > 0");

  const Eigen::MatrixXd u = fit.scores_by_dyad(net.size());
  const auto cap = static_cast<std::uint32_t>(
      std::min(std::floor(bandwidth), static_cast<double>(net.size())));
  std::vector<double> weight(cap + 1);
  for (std::uint32_t s = 0; s <= cap; ++s) weight[s] = kernel(s / bandwidth);

  Eigen::MatrixXd g(u.rows(), u.cols());
  parallel_for_with_state(
      net.size(), options.threads, [&] { return ShellWalker(net); },
      [&](ShellWalker& walker, std::size_t m) {
        const auto reached = walker.walk(static_cast<DyadId>(m), cap);
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(u.cols());
        for (std::uint32_t s = 0; s <= reached; ++s) {
          if (weight[s] == 0.0) continue;
          Eigen::RowVectorXd shell_sum = Eigen::RowVectorXd::Zero(u.cols());
          for (DyadId other : walker.shell(s)) shell_sum += u.row(other);
          acc += weight[s] * shell_sum;
        }
        g.row(static_cast<Eigen::Index>(m)) = acc;
      });

  VarianceEstimate v;
  v.kind = EstimatorKind::kNetwork;
  v.kernel = kernel;
  v.bandwidth = bandwidth;
  v.matrix = sandwich(fit.bread, meat_from(u, g));
  return v;
}

double default_bandwidth(std::size_t n_dyads, double average_degree) {
  if (n_dyads == 0) throw ValidationError("bandwidth rule needs at least one dyad");
  return 2.0 * std::log(static_cast<double>(n_dyads)) /
         std::log(std::max(average_degree, 1.05));
}

double default_bandwidth(const DyadNetwork& net) {
  return default_bandwidth(net.size(), net.average_degree());
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

VarianceEstimate repair_psd(const VarianceEstimate& v, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("PSD repair epsilon must be finite and >= 0");
  }
  const double scale = std::max(1.0, v.matrix.cwiseAbs().maxCoeff());
  if ((v.matrix - v.matrix.transpose()).cwiseAbs().maxCoeff() >
      kSymmetryTolerance * scale) {
    throw ValidationError("PSD repair requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v.matrix);
  const Eigen::VectorXd shifted = eig.eigenvalues().array() + epsilon;
  VarianceEstimate out = v;
  out.matrix = eig.eigenvectors() * shifted.asDiagonal() *
               eig.eigenvectors().transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  out.psd_repaired = true;
  out.psd_epsilon = epsilon;
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile level must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

ConfidenceInterval confidence_interval(const OlsFit& fit,
                                       const VarianceEstimate& v,
                                       std::size_t coord, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must be in (0, 1)");
  }
  const auto k = static_cast<Eigen::Index>(coord);
  if (k >= fit.beta.size()) {
    throw ValidationError("coefficient index " + std::to_string(coord) +
                          " out of range");
  }
  const double vkk = v.matrix(k, k);
  if (vkk < 0.0) {
    std::ostringstream msg;
    msg << estimator_name(v.kind) << " variance for coefficient " << coord
        << " is negative (" << vkk << "); apply repair_psd first";
    throw NumericalError(msg.str());
  }
  const double half = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(vkk);
  return {fit.beta(k) - half, fit.beta(k) + half};
}

}  // namespace netdyad
