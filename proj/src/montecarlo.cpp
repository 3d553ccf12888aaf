#include "netdyad/montecarlo.hpp"

#include <cmath>
#include <limits>

#include "netdyad/error.hpp"
#include "netdyad/parallel.hpp"

namespace netdyad {

namespace {

constexpr std::uint64_t kPhaseGraph = 1;
constexpr std::uint64_t kPhaseCovariates = 2;
constexpr std::uint64_t kPhaseErrors = 3;
constexpr std::uint64_t kFixedGraphStream = std::numeric_limits<std::uint64_t>::max();
constexpr std::size_t kMaxAttempts = 64;

std::uint64_t phase_tag(std::size_t attempt, std::uint64_t phase) {
  return (static_cast<std::uint64_t>(attempt) << 8) | phase;
}

NodeGraph draw_graph(const McStudyConfig& cfg, std::size_t rep,
                     std::size_t attempt) {
  Rng rng = cfg.fix_graph
                ? Rng::substream(cfg.seed, kFixedGraphStream, kPhaseGraph)
                : Rng::substream(cfg.seed, rep, phase_tag(attempt, kPhaseGraph));
  return generate_graph(cfg.graph, rng);
}

EstimatorRecord summarize_estimate(const OlsFit& fit, VarianceEstimate v,
                                   const McStudyConfig& cfg) {
  EstimatorRecord rec;
  if (min_eigenvalue(v.matrix) < 0.0) {
    v = repair_psd(v, cfg.psd_epsilon);
    rec.psd_repaired = true;
    // A single shift may not clear a strongly negative eigenvalue; what is
    // left is clamped at zero.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v.matrix);
    if (eig.eigenvalues()(0) < 0.0) {
      v.matrix = eig.eigenvectors() *
                 eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                 eig.eigenvectors().transpose();
    }
  }
  const ConfidenceInterval ci = confidence_interval(fit, v, 0, cfg.level);
  rec.covered = ci.contains(cfg.beta_true);
  rec.ci_length = ci.length();
  rec.se = std::sqrt(std::max(v.matrix(0, 0), 0.0));
  return rec;
}

}  // namespace

ShockMode parse_shock_mode(const std::string& name) {
  if (name == "shared") return ShockMode::kSharedPair;
  if (name == "ordered") return ShockMode::kOrderedPair;
  throw ValidationError("unknown shock mode '" + name +
                        "' (expected shared or ordered)");
}

std::string shock_mode_name(ShockMode mode) {
  return mode == ShockMode::kSharedPair ? "shared" : "ordered";
}

void McStudyConfig::validate() const {
  GraphSpec g = graph;
  g.validate();
  if (!std::isfinite(gamma) || gamma > 1.0 ||
      (gamma < 0.0 && !allow_negative_gamma) || gamma < -1.0) {
    throw ValidationError("gamma must lie in [0, 1]");
  }
  if (reps < 1) throw ValidationError("reps must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must be in (0, 1)");
  if (bandwidth && (!std::isfinite(*bandwidth) || !(*bandwidth > 0.0))) {
    throw ValidationError("bandwidth must be finite and > 0");
  }
  if (!(psd_epsilon >= 0.0) || !std::isfinite(psd_epsilon)) {
    throw ValidationError("PSD epsilon must be finite and >= 0");
  }
  if (!std::isfinite(beta_true)) throw ValidationError("beta_true must be finite");
}

Eigen::VectorXd covariates_from_node_values(const DyadIndex& idx,
                                            const std::vector<double>& z) {
  if (z.size() < idx.n_nodes()) {
    throw ValidationError("need one node value per node");
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(idx.size()));
  for (DyadId m = 0; m < idx.size(); ++m) {
    const auto& d = idx.dyad(m);
    x(m) = std::abs(z[d.i] - z[d.j]);
  }
  return x;
}

Eigen::VectorXd simulate_covariates(const DyadIndex& idx, Rng& rng) {
  std::vector<double> z(idx.n_nodes());
  for (double& v : z) v = rng.normal();
  return covariates_from_node_values(idx, z);
}

Eigen::VectorXd simulate_errors(const DyadNetwork& net,
                                std::uint32_t max_spillover, double gamma,
                                Rng& rng, ShockMode mode) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
  const bool spill = max_spillover > 0 && gamma != 0.0;
  std::vector<double> weight(max_spillover + 1, 1.0);
  for (std::uint32_t s = 1; s <= max_spillover; ++s) weight[s] = weight[s - 1] * gamma;

  ShellWalker walker(net);
  for (DyadId m = 0; m < net.size(); ++m) {
    eps(m) += rng.normal();
    if (!spill) continue;
    const auto reached = walker.walk(m, max_spillover);
    for (std::uint32_t s = 1; s <= reached; ++s) {
      for (DyadId other : walker.shell(s)) {
        if (mode == ShockMode::kSharedPair) {
          if (other < m) continue;  // drawn when `other` was the source
          const double shock = weight[s] * rng.normal();
          eps(m) += shock;
          eps(other) += shock;
        } else {
          eps(m) += weight[s] * rng.normal();
        }
      }
    }
  }
  return eps;
}

SimulatedDataset simulate_dataset(const McStudyConfig& cfg,
                                  std::size_t rep_index, std::size_t attempt) {
  SimulatedDataset ds;
  ds.graph = draw_graph(cfg, rep_index, attempt);
  ds.net = DyadNetwork(DyadIndex(ds.graph));
  Rng cov_rng = Rng::substream(cfg.seed, rep_index, phase_tag(attempt, kPhaseCovariates));
  Rng err_rng = Rng::substream(cfg.seed, rep_index, phase_tag(attempt, kPhaseErrors));
  const Eigen::VectorXd x = simulate_covariates(ds.net.index(), cov_rng);
  const Eigen::VectorXd eps =
      simulate_errors(ds.net, cfg.max_spillover, cfg.gamma, err_rng, cfg.shock_mode);
  ds.data.y = cfg.beta_true * x + eps;
  ds.data.X = x;
  ds.data.column_names = {"x"};
  ds.data.dyad_ids.resize(ds.net.size());
  for (DyadId m = 0; m < ds.net.size(); ++m) ds.data.dyad_ids[m] = m;
  return ds;
}

ReplicationRecord run_replication(const McStudyConfig& cfg,
                                  std::size_t rep_index) {
  ReplicationRecord rec;
  rec.rep = rep_index;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    rec.attempts = attempt + 1;
    SimulatedDataset ds = simulate_dataset(cfg, rep_index, attempt);
    if (ds.net.size() < 1) continue;
    OlsFit fit;
    try {
      fit = ols_fit(ds.data);
    } catch (const NumericalError&) {
      continue;
    } catch (const ValidationError&) {
      continue;
    }
    rec.ok = true;
    rec.n_dyads = ds.net.size();
    rec.beta_hat = fit.beta(0);
    rec.bandwidth = cfg.bandwidth ? *cfg.bandwidth : default_bandwidth(ds.net);
    rec.estimators[0] = summarize_estimate(fit, ehw_variance(fit), cfg);
    rec.estimators[1] =
        summarize_estimate(fit, dyadic_robust_variance(fit, ds.net), cfg);
    // The bandwidth rule can return 0 on a single isolated dyad; only the
    // own shell enters then.
    const double b = rec.bandwidth > 0.0 ? rec.bandwidth : 0.5;
    rec.estimators[2] = summarize_estimate(
        fit, network_hac_variance(fit, ds.net, cfg.kernel, b), cfg);
    return rec;
  }
  return rec;
}

McTable summarize(const McStudyConfig& cfg,
                  const std::vector<ReplicationRecord>& records) {
  McTable t;
  t.config = cfg;
  double beta_sum = 0.0, dyad_sum = 0.0;
  std::array<double, 3> covered{}, length{}, se{};
  for (const auto& r : records) {
    if (!r.ok) {
      ++t.reps_failed;
      t.redraws += r.attempts;
      continue;
    }
    ++t.reps_completed;
    t.redraws += r.attempts - 1;
    beta_sum += r.beta_hat;
    dyad_sum += static_cast<double>(r.n_dyads);
    for (std::size_t e = 0; e < 3; ++e) {
      covered[e] += r.estimators[e].covered ? 1.0 : 0.0;
      length[e] += r.estimators[e].ci_length;
      se[e] += r.estimators[e].se;
      if (r.estimators[e].psd_repaired) ++t.estimators[e].psd_repairs;
    }
  }
  if (t.reps_completed == 0) {
    throw NumericalError("all Monte Carlo replications failed");
  }
  const auto n = static_cast<double>(t.reps_completed);
  t.mean_beta = beta_sum / n;
  t.mean_dyads = dyad_sum / n;
  double ss = 0.0;
  for (const auto& r : records) {
    if (r.ok) ss += (r.beta_hat - t.mean_beta) * (r.beta_hat - t.mean_beta);
  }
  t.empirical_se = t.reps_completed > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  for (std::size_t e = 0; e < 3; ++e) {
    auto& s = t.estimators[e];
    s.kind = kAllEstimators[e];
    s.coverage = covered[e] / n;
    s.avg_length = length[e] / n;
    s.mean_se = se[e] / n;
    s.bias_pct = t.empirical_se > 0.0
                     ? (s.mean_se - t.empirical_se) / t.empirical_se * 100.0
                     : 0.0;
  }
  return t;
}

McTable run_study(const McStudyConfig& cfg,
                  std::vector<ReplicationRecord>* records) {
  cfg.validate();
  std::vector<ReplicationRecord> recs(cfg.reps);
  parallel_for(cfg.reps, cfg.threads,
               [&](std::size_t r) { recs[r] = run_replication(cfg, r); });
  McTable t = summarize(cfg, recs);
  if (records) *records = std::move(recs);
  return t;
}

}  // namespace netdyad
