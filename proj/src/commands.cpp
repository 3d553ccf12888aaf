#include "netdyad/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netdyad/diagnostics.hpp"
#include "netdyad/error.hpp"
#include "netdyad/montecarlo.hpp"
#include "netdyad/parallel.hpp"

namespace netdyad {

namespace {

std::optional<double> parse_bandwidth(const std::string& s) {
  if (s == "auto") return std::nullopt;
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ValidationError("--bandwidth expects 'auto' or a positive number, got '" +
                          s + "'");
  }
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw ValidationError("--bandwidth must be finite and > 0");
  }
  return v;
}

std::optional<double> parse_psd(const std::string& s) {
  if (s == "off") return std::nullopt;
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ValidationError("--psd-repair expects 'off' or a number, got '" + s + "'");
  }
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError("--psd-repair epsilon must be finite and >= 0");
  }
  return v;
}

void emit(const RunConfig& cfg, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (cfg.out_path) {
    write_file(*cfg.out_path, write);
  } else {
    write(out);
  }
}

NodeGraph load_or_generate(const RunConfig& cfg) {
  if (!cfg.edges_path.empty()) return parse_edge_csv(cfg.edges_path);
  if (!cfg.have_graph_spec) {
    throw ValidationError("either --edges or --spec/--param/--n is required");
  }
  GraphSpec spec = cfg.graph;
  spec.seed = cfg.seed;
  return generate_graph(spec);
}

int run_estimate(const RunConfig& cfg, std::ostream& out) {
  const NodeGraph graph = parse_edge_csv(cfg.edges_path);
  const DyadNetwork net{DyadIndex(graph)};
  RegressionData data = parse_dyadic_csv(cfg.data_path, net.index());
  const bool fe = data.group_ids.has_value();
  if (cfg.intercept || fe) data = with_intercept(data);
  if (fe) data = within_demean(data);
  const OlsFit fit = ols_fit(data);

  EstimateReport rep;
  rep.terms = fit.data.column_names;
  rep.beta = fit.beta;
  rep.level = cfg.level;
  rep.n_dyads = net.size();
  rep.fixed_effects = fe;

  for (EstimatorKind kind : cfg.estimators) {
    VarianceEstimate v;
    switch (kind) {
      case EstimatorKind::kEhw:
        v = ehw_variance(fit);
        break;
      case EstimatorKind::kDyadic:
        v = dyadic_robust_variance(fit, net);
        break;
      case EstimatorKind::kNetwork: {
        double b = 0.0;
        if (cfg.bandwidth) {
          b = *cfg.bandwidth;
        } else if (cfg.bandwidth_node_degree) {
          b = default_bandwidth(net.size(),
                                2.0 * static_cast<double>(graph.n_edges()) /
                                    static_cast<double>(graph.n_nodes()));
        } else {
          b = default_bandwidth(net);
        }
        // The rule gives 0 for a single dyad; only the own term enters then.
        if (!(b > 0.0)) b = 0.5;
        v = network_hac_variance(fit, net, cfg.kernel, b, {cfg.threads});
        break;
      }
    }
    if (cfg.psd_epsilon && min_eigenvalue(v.matrix) < 0.0) {
      v = repair_psd(v, *cfg.psd_epsilon);
    }
    std::vector<ConfidenceInterval> cis;
    for (std::size_t k = 0; k < rep.terms.size(); ++k) {
      cis.push_back(confidence_interval(fit, v, k, cfg.level));
    }
    rep.variances.push_back(std::move(v));
    rep.cis.push_back(std::move(cis));
  }
  emit(cfg, out, [&](std::ostream& o) { emit_table(o, rep, cfg.format); });
  return 0;
}

McStudyConfig study_config(const RunConfig& cfg) {
  McStudyConfig mc;
  mc.graph = cfg.graph;
  mc.max_spillover = cfg.max_spillover;
  mc.gamma = cfg.gamma;
  mc.reps = cfg.reps;
  mc.level = cfg.level;
  mc.kernel = cfg.kernel;
  mc.bandwidth = cfg.bandwidth;
  mc.seed = cfg.seed;
  mc.psd_epsilon = cfg.mc_psd_epsilon;
  mc.threads = cfg.threads;
  mc.fix_graph = cfg.fix_graph;
  mc.shock_mode = cfg.shock_mode;
  mc.allow_negative_gamma = cfg.allow_negative_gamma;
  return mc;
}

void export_replication(const McStudyConfig& mc, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const SimulatedDataset ds = simulate_dataset(mc, 0);
  write_file(dir / "edges.csv", [&](std::ostream& o) { write_edge_csv(o, ds.graph); });
  write_file(dir / "data.csv", [&](std::ostream& o) {
    write_dyadic_csv(o, ds.net.index(), ds.data);
  });
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.have_graph_spec) throw ValidationError("simulate requires --spec, --param and --n");
  if (cfg.full_grid) {
    // Full factorial design: both graph families, parameters 1..3 and
    // N in {500, 1000, 5000}.
    std::ostringstream csv;
    csv << "spec,param,n,estimator,coverage,avg_length,mean_se,bias_pct,"
           "empirical_se,psd_repairs\n";
    for (GraphKind kind : {GraphKind::kBarabasiAlbert, GraphKind::kErdosRenyi}) {
      for (double param : {1.0, 2.0, 3.0}) {
        for (std::size_t n : {500u, 1000u, 5000u}) {
          McStudyConfig mc = study_config(cfg);
          mc.graph.kind = kind;
          mc.graph.param = param;
          mc.graph.n_nodes = n;
          if (!cfg.reps_given) mc.reps = 5000;
          const McTable t = run_study(mc);
          emit_table(out, t, TableFormat::kText);
          out << '\n';
          std::ostringstream cell;
          emit_table(cell, t, TableFormat::kCsv);
          std::istringstream lines(cell.str());
          std::string line;
          std::getline(lines, line);  // header
          while (std::getline(lines, line)) {
            csv << graph_kind_name(kind) << ',' << format_full(param) << ',' << n
                << ',' << line << '\n';
          }
        }
      }
    }
    if (cfg.out_path) {
      write_file(*cfg.out_path, [&](std::ostream& o) { o << csv.str(); });
    }
    return 0;
  }

  const McStudyConfig mc = study_config(cfg);
  if (cfg.export_dir) export_replication(mc, *cfg.export_dir);
  std::vector<ReplicationRecord> records;
  const McTable t = run_study(mc, &records);
  if (cfg.out_path) {
    write_file(*cfg.out_path,
               [&](std::ostream& o) { emit_table(o, t, TableFormat::kCsv); });
  }
  if (cfg.draws_path) {
    write_file(*cfg.draws_path,
               [&](std::ostream& o) { emit_replications(o, records); });
  }
  emit_table(out, t, cfg.out_path ? TableFormat::kText : cfg.format);
  return 0;
}

int run_graph_stats(const RunConfig& cfg, std::ostream& out) {
  const NodeGraph graph = load_or_generate(cfg);
  const DyadNetwork net{DyadIndex(graph)};
  const GraphStats st = graph_stats(graph, net);
  emit(cfg, out, [&](std::ostream& o) { emit_table(o, st, cfg.format); });
  return 0;
}

int run_diagnose(const RunConfig& cfg, std::ostream& out) {
  const NodeGraph graph = load_or_generate(cfg);
  const DyadNetwork net{DyadIndex(graph)};
  const double b = cfg.bandwidth ? *cfg.bandwidth : default_bandwidth(net);
  DensenessOptions opts;
  opts.max_s = cfg.max_s;
  opts.threads = cfg.threads;
  const DensenessReport rep = denseness_report(net, b, opts);
  emit(cfg, out, [&](std::ostream& o) { emit_table(o, rep, cfg.format); });
  return 0;
}

int run_emit_edges(const RunConfig& cfg, std::ostream& out) {
  const NodeGraph graph = parse_edge_csv(cfg.edges_path);
  emit(cfg, out, [&](std::ostream& o) { write_edge_csv(o, graph); });
  return 0;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> config_file_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    tokens.push_back(key);
    if (value != "true") tokens.push_back(value);
  }
  return tokens;
}

int run(const RunConfig& cfg, std::ostream& out) {
  switch (cfg.subcommand) {
    case Subcommand::kEstimate: return run_estimate(cfg, out);
    case Subcommand::kSimulate: return run_simulate(cfg, out);
    case Subcommand::kGraphStats: return run_graph_stats(cfg, out);
    case Subcommand::kDiagnose: return run_diagnose(cfg, out);
    case Subcommand::kEmitEdges: return run_emit_edges(cfg, out);
  }
  return 2;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);

  // Splice config-file values in behind the command-line flags.
  try {
    for (std::size_t k = 0; k < args.size(); ++k) {
      std::optional<std::string> path;
      std::size_t width = 1;
      if (args[k] == "--config" && k + 1 < args.size()) {
        path = args[k + 1];
        width = 2;
      } else if (args[k].rfind("--config=", 0) == 0) {
        path = args[k].substr(9);
      }
      if (!path) continue;
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k),
                 args.begin() + static_cast<std::ptrdiff_t>(k + width));
      const auto tokens = config_file_tokens(*path);
      std::vector<std::string> extra;
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        const bool has_value = t + 1 < tokens.size() && tokens[t + 1].rfind("--", 0) != 0;
        if (!has_flag(args, tokens[t])) {
          extra.push_back(tokens[t]);
          if (has_value) extra.push_back(tokens[t + 1]);
        }
        if (has_value) ++t;
      }
      args.insert(args.end(), extra.begin(), extra.end());
      break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  RunConfig cfg;
  CLI::App app{"Dyadic regression with network-robust variance estimation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string kernel = "rectangular", bandwidth, psd = "off", format = "text";
  std::string spec, shock = "shared";
  std::vector<std::string> estimators;
  std::string out_path, draws_path, export_dir;
  double param = 0.0;
  std::size_t n_nodes = 0;
  std::uint32_t max_s = 0;
  bool no_intercept = false;
  std::string bandwidth_degree = "dyad";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--format", format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = auto)")
        ->envname("NETDYAD_THREADS");
  };
  auto add_graph_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", spec, "Random graph family: ba or er")
        ->check(CLI::IsMember({"ba", "er"}));
    sub->add_option("--param", param, "nu for ba, lambda for er");
    sub->add_option("--n", n_nodes, "Number of nodes");
    sub->add_option("--seed", cfg.seed, "Base seed");
    sub->add_option("--seed-lambda", cfg.graph.seed_lambda,
                    "Seed-graph edge probability times seed size for ba");
  };

  auto* est = app.add_subcommand("estimate", "OLS with EHW, dyadic and network SEs");
  est->add_option("--edges", cfg.edges_path, "Edge list CSV (i,j)")->required();
  est->add_option("--data", cfg.data_path, "Dyadic data CSV")->required();
  est->add_option("--estimator", estimators, "ehw, dyadic, network or all")
      ->check(CLI::IsMember({"ehw", "dyadic", "network", "all"}));
  est->add_option("--kernel", kernel, "rectangular or bartlett");
  est->add_option("--bandwidth", bandwidth, "auto or a positive number");
  est->add_option("--bandwidth-degree", bandwidth_degree,
                  "Average degree used by the bandwidth rule: dyad or node")
      ->check(CLI::IsMember({"dyad", "node"}));
  est->add_option("--psd-repair", psd, "Eigenvalue shift, or off");
  est->add_option("--level", cfg.level, "Confidence level");
  est->add_flag("--no-intercept", no_intercept, "Do not add an intercept column");
  add_common(est);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage study");
  add_graph_spec(sim);
  sim->add_option("--S", cfg.max_spillover, "Maximum spillover distance");
  sim->add_option("--gamma", cfg.gamma, "Spillover decay");
  auto* reps_opt = sim->add_option("--reps", cfg.reps, "Replications");
  sim->add_option("--bandwidth", bandwidth, "auto or a positive number (default 2)");
  sim->add_option("--kernel", kernel, "rectangular or bartlett");
  sim->add_option("--level", cfg.level, "Confidence level");
  sim->add_option("--psd-epsilon", cfg.mc_psd_epsilon, "Eigenvalue shift for repairs");
  sim->add_flag("--fix-graph", cfg.fix_graph, "Draw one network for all replications");
  sim->add_option("--shock-mode", shock, "shared or ordered pair shocks")
      ->check(CLI::IsMember({"shared", "ordered"}));
  sim->add_flag("--allow-negative-gamma", cfg.allow_negative_gamma,
                "Permit gamma in [-1, 0) (unvalidated)");
  sim->add_flag("--full", cfg.full_grid, "Run the full spec x param x N grid");
  sim->add_option("--draws", draws_path, "Per-replication CSV output");
  sim->add_option("--export-data", export_dir,
                  "Write replication 0 as edges.csv and data.csv into this directory");
  add_common(sim);

  auto* gs = app.add_subcommand("graph-stats", "Node and dyad degree summary");
  gs->add_option("--edges", cfg.edges_path, "Edge list CSV (instead of a random graph)");
  add_graph_spec(gs);
  add_common(gs);

  auto* dg = app.add_subcommand("diagnose", "Network denseness report");
  dg->add_option("--edges", cfg.edges_path, "Edge list CSV (instead of a random graph)");
  add_graph_spec(dg);
  dg->add_option("--bandwidth", bandwidth, "auto or a positive number");
  auto* max_s_opt = dg->add_option("--max-s", max_s, "Last shell to tabulate");
  add_common(dg);

  auto* ee = app.add_subcommand("emit-edges", "Rewrite an edge list in canonical order");
  ee->add_option("--edges", cfg.edges_path, "Edge list CSV")->required();
  add_common(ee);

  std::vector<const char*> cargv = {argv[0]};
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (est->parsed()) cfg.subcommand = Subcommand::kEstimate;
    if (sim->parsed()) cfg.subcommand = Subcommand::kSimulate;
    if (gs->parsed()) cfg.subcommand = Subcommand::kGraphStats;
    if (dg->parsed()) cfg.subcommand = Subcommand::kDiagnose;
    if (ee->parsed()) cfg.subcommand = Subcommand::kEmitEdges;

    cfg.kernel = Kernel::parse(kernel);
    cfg.format = parse_table_format(format);
    cfg.shock_mode = parse_shock_mode(shock);
    cfg.psd_epsilon = parse_psd(psd);
    cfg.bandwidth_node_degree = bandwidth_degree == "node";
    cfg.intercept = !no_intercept;
    cfg.reps_given = reps_opt->count() > 0;
    if (max_s_opt->count() > 0) cfg.max_s = max_s;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!draws_path.empty()) cfg.draws_path = draws_path;
    if (!export_dir.empty()) cfg.export_dir = export_dir;

    if (cfg.subcommand == Subcommand::kSimulate) {
      cfg.bandwidth = bandwidth.empty() ? std::optional<double>(2.0)
                                        : parse_bandwidth(bandwidth);
    } else if (!bandwidth.empty()) {
      cfg.bandwidth = parse_bandwidth(bandwidth);
    }

    if (!estimators.empty()) {
      cfg.estimators.clear();
      for (const auto& e : estimators) {
        if (e == "all") {
          cfg.estimators.assign(kAllEstimators.begin(), kAllEstimators.end());
          break;
        }
        cfg.estimators.push_back(parse_estimator_kind(e));
      }
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
      throw ValidationError("--level must be in (0, 1)");
    }

    if (!spec.empty()) {
      if (n_nodes == 0 || param == 0.0) {
        throw ValidationError("--spec requires --param and --n");
      }
      cfg.have_graph_spec = true;
      cfg.graph.kind = parse_graph_kind(spec);
      cfg.graph.param = param;
      cfg.graph.n_nodes = n_nodes;
      cfg.graph.seed = cfg.seed;
    }
    return run(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace netdyad
