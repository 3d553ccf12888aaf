#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netdyad/io.hpp"

namespace netdyad {

enum class Subcommand { kEstimate, kSimulate, kGraphStats, kDiagnose, kEmitEdges };

// Everything one `netdyad` invocation needs, after flag and config-file
// merging.
struct RunConfig {
  Subcommand subcommand = Subcommand::kEstimate;

  std::filesystem::path edges_path;
  std::filesystem::path data_path;
  std::optional<std::filesystem::path> out_path;
  TableFormat format = TableFormat::kText;

  // estimate
  std::vector<EstimatorKind> estimators = {
      EstimatorKind::kEhw, EstimatorKind::kDyadic, EstimatorKind::kNetwork};
  Kernel kernel;
  std::optional<double> bandwidth;      // unset = bandwidth rule
  bool bandwidth_node_degree = false;   // rule uses node-level average degree
  std::optional<double> psd_epsilon;    // unset = no repair
  double level = 0.95;
  bool intercept = true;

  // simulate, graph-stats, diagnose
  GraphSpec graph;
  bool have_graph_spec = false;
  std::uint64_t seed = 1;
  std::uint32_t max_spillover = 2;
  double gamma = 0.8;
  std::size_t reps = 1000;
  bool reps_given = false;
  double mc_psd_epsilon = 0.005;
  bool fix_graph = false;
  ShockMode shock_mode = ShockMode::kSharedPair;
  bool allow_negative_gamma = false;
  bool full_grid = false;
  std::optional<std::filesystem::path> draws_path;
  std::optional<std::filesystem::path> export_dir;

  // diagnose
  std::optional<std::uint32_t> max_s;

  unsigned threads = 0;  // 0 = NETDYAD_THREADS or hardware concurrency
};

// Reads `key = value` lines (blank lines and # comments ignored) and returns
// argv-style tokens `--key value`; a value of `true` yields a bare flag.
std::vector<std::string> config_file_tokens(const std::filesystem::path& path);

// Entry point of the `netdyad` tool; argv[0] is the program name. Values
// from a --config file apply only to flags absent from the command line.
// Errors go to `err` and yield a nonzero status.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

int run(const RunConfig& cfg, std::ostream& out);

}  // namespace netdyad
