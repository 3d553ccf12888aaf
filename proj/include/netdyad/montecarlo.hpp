#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netdyad/dyad_graph.hpp"
#include "netdyad/graph_gen.hpp"
#include "netdyad/regression.hpp"
#include "netdyad/rng.hpp"
#include "netdyad/variance.hpp"

namespace netdyad {

// How the pair shocks behind the spillover errors are indexed.
//   kSharedPair:  one shock per unordered pair {m, m'} within distance S,
//                 entering both errors with weight gamma^s. Errors of dyads
//                 within distance S are correlated.
//   kOrderedPair: an independent shock per ordered pair (m, m'). Errors are
//                 heteroskedastic but mutually independent.
enum class ShockMode { kSharedPair, kOrderedPair };

ShockMode parse_shock_mode(const std::string& name);
std::string shock_mode_name(ShockMode mode);

struct McStudyConfig {
  GraphSpec graph;                    // graph.seed is ignored; see `seed`
  std::uint32_t max_spillover = 2;    // S
  double gamma = 0.8;
  double beta_true = 1.0;
  std::size_t reps = 1000;
  double level = 0.95;
  Kernel kernel;
  // Network estimator bandwidth; unset selects default_bandwidth per graph.
  std::optional<double> bandwidth = 2.0;
  std::uint64_t seed = 1;
  double psd_epsilon = 0.005;
  unsigned threads = 1;
  bool fix_graph = false;
  ShockMode shock_mode = ShockMode::kSharedPair;
  // Unvalidated negative-spillover designs.
  bool allow_negative_gamma = false;

  void validate() const;
};

// One z_i ~ N(0, 1) per node, x_m = |z_i - z_j| per dyad.
Eigen::VectorXd simulate_covariates(const DyadIndex& idx, Rng& rng);
Eigen::VectorXd covariates_from_node_values(const DyadIndex& idx,
                                            const std::vector<double>& z);

// eps_m = eta_mm + sum_{s=1..S} gamma^s sum_{m' in shell(m, s)} eta_{m,m'}
// with standard normal shocks indexed per `mode`.
Eigen::VectorXd simulate_errors(const DyadNetwork& net, std::uint32_t max_spillover,
                                double gamma, Rng& rng,
                                ShockMode mode = ShockMode::kSharedPair);

struct EstimatorRecord {
  bool covered = false;
  double ci_length = 0.0;
  double se = 0.0;
  bool psd_repaired = false;

  friend bool operator==(const EstimatorRecord&, const EstimatorRecord&) = default;
};

inline constexpr std::array<EstimatorKind, 3> kAllEstimators = {
    EstimatorKind::kEhw, EstimatorKind::kDyadic, EstimatorKind::kNetwork};

struct ReplicationRecord {
  std::size_t rep = 0;
  bool ok = false;
  std::size_t attempts = 0;  // draws used, including degenerate ones
  std::size_t n_dyads = 0;
  double beta_hat = 0.0;
  double bandwidth = 0.0;
  std::array<EstimatorRecord, 3> estimators{};  // ordered as kAllEstimators

  friend bool operator==(const ReplicationRecord&, const ReplicationRecord&) = default;
};

// One simulated data set: network, dyad network and regression data.
struct SimulatedDataset {
  NodeGraph graph;
  DyadNetwork net;
  RegressionData data;
};

// Draws the data for (seed, rep_index, attempt). The graph is redrawn unless
// cfg.fix_graph is set.
SimulatedDataset simulate_dataset(const McStudyConfig& cfg,
                                  std::size_t rep_index,
                                  std::size_t attempt = 0);

// Fully determined by (cfg.seed, rep_index). Draws with no dyads or a
// singular design are replaced by the next attempt's substream.
ReplicationRecord run_replication(const McStudyConfig& cfg,
                                  std::size_t rep_index);

struct EstimatorSummary {
  EstimatorKind kind = EstimatorKind::kEhw;
  double coverage = 0.0;
  double avg_length = 0.0;
  double mean_se = 0.0;
  double bias_pct = 0.0;  // (mean_se - empirical_se) / empirical_se * 100
  std::size_t psd_repairs = 0;
};

struct McTable {
  McStudyConfig config;
  std::size_t reps_completed = 0;
  std::size_t reps_failed = 0;
  std::size_t redraws = 0;
  double mean_beta = 0.0;
  double empirical_se = 0.0;  // sample SD of beta_hat across replications
  double mean_dyads = 0.0;
  std::array<EstimatorSummary, 3> estimators{};
};

McTable summarize(const McStudyConfig& cfg,
                  const std::vector<ReplicationRecord>& records);

// Runs cfg.reps replications over cfg.threads workers. Output does not
// depend on the worker count. When `records` is non-null it receives the
// per-replication records in replication order.
McTable run_study(const McStudyConfig& cfg,
                  std::vector<ReplicationRecord>* records = nullptr);

}  // namespace netdyad
