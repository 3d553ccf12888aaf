#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "netdyad/dyad_graph.hpp"
#include "netdyad/regression.hpp"

namespace netdyad {

enum class EstimatorKind { kEhw, kDyadic, kNetwork };

EstimatorKind parse_estimator_kind(const std::string& name);
std::string estimator_name(EstimatorKind kind);

enum class KernelKind { kRectangular, kBartlett };

// Symmetric weight on normalized distance z = s / b with w(0) = 1 and
// w(z) = 0 for |z| > 1.
class Kernel {
 public:
  constexpr Kernel() = default;
  constexpr explicit Kernel(KernelKind kind) : kind_(kind) {}

  static Kernel parse(const std::string& name);

  KernelKind kind() const { return kind_; }
  std::string name() const;

  double operator()(double z) const;

 private:
  KernelKind kind_ = KernelKind::kRectangular;
};

// Sandwich variance of the OLS coefficients.
//
// All three estimators use unnormalized sums: bread * meat * bread with
// bread = (sum x x')^{-1} and meat a weighted double sum of score
// cross-products. No 1/M or sqrt(N) factor enters, so the estimates compare
// directly and feed confidence intervals as-is.
struct VarianceEstimate {
  Eigen::MatrixXd matrix;
  EstimatorKind kind = EstimatorKind::kEhw;
  std::optional<Kernel> kernel;
  std::optional<double> bandwidth;
  bool psd_repaired = false;
  double psd_epsilon = 0.0;

  static constexpr const char* kScaleConvention =
      "raw sums: (sum x x')^-1 (sum_m sum_m' w_mm' u_m u_m') (sum x x')^-1";
};

struct VarianceOptions {
  // Workers for the per-dyad accumulation; 0 uses default_thread_count().
  // Results are bitwise identical for every value.
  unsigned threads = 1;
};

VarianceEstimate ehw_variance(const OlsFit& fit);

// Meat over pairs at distance 0 or 1 in the dyad network.
VarianceEstimate dyadic_robust_variance(const OlsFit& fit,
                                        const DyadNetwork& net);

// Kernel-weighted meat sum_s w(s / b) sum_m sum_{m' in shell(m, s)} u_m u_m'
// accumulated shell by shell with breadth-first search truncated at
// floor(b). Disconnected pairs contribute nothing.
VarianceEstimate network_hac_variance(const OlsFit& fit,
                                      const DyadNetwork& net,
                                      const Kernel& kernel, double bandwidth,
                                      const VarianceOptions& options = {});

// 2 log(M) / log(max(d, 1.05)) for M dyads of average degree d.
double default_bandwidth(std::size_t n_dyads, double average_degree);
// Uses the dyad-network average degree.
double default_bandwidth(const DyadNetwork& net);

// Adds epsilon to every eigenvalue of the (symmetric) estimate.
VarianceEstimate repair_psd(const VarianceEstimate& v, double epsilon);

double min_eigenvalue(const Eigen::MatrixXd& m);

// Standard normal quantile.
double normal_quantile(double p);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double value) const { return lo <= value && value <= hi; }
};

// beta_k -/+ z_{(1 + level) / 2} sqrt(v_kk).
ConfidenceInterval confidence_interval(const OlsFit& fit,
                                       const VarianceEstimate& v,
                                       std::size_t coord, double level);

}  // namespace netdyad
