#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "netdyad/diagnostics.hpp"
#include "netdyad/dyad_graph.hpp"
#include "netdyad/graph_gen.hpp"
#include "netdyad/montecarlo.hpp"
#include "netdyad/regression.hpp"
#include "netdyad/variance.hpp"

namespace netdyad {

enum class TableFormat { kCsv, kText };

TableFormat parse_table_format(const std::string& name);

// Minimal RFC-4180 reader: comma separated, optional double quotes with ""
// escapes, CRLF or LF line ends. Line numbers are 1-based and count the
// header.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::filesystem::path& path);

// Edge list with header `i,j`, one undirected edge per row, 0-based ids.
// The node count is one past the largest id seen.
NodeGraph parse_edge_csv(const std::filesystem::path& path);
NodeGraph parse_edge_csv(std::istream& in, const std::string& source);

// Canonical edge list: header `i,j`, rows sorted by (min, max).
void write_edge_csv(std::ostream& out, const NodeGraph& graph);

// Dyadic data with header `dyad_id,i,j,y,<covariates...>[,group]`. Rows are
// matched to `idx` through (i, j); every active dyad must appear exactly
// once. Empty, NA or non-numeric cells are errors.
RegressionData parse_dyadic_csv(const std::filesystem::path& path,
                                const DyadIndex& idx);
RegressionData parse_dyadic_csv(std::istream& in, const std::string& source,
                                const DyadIndex& idx);

void write_dyadic_csv(std::ostream& out, const DyadIndex& idx,
                      const RegressionData& data);

// Coefficients and variance estimates from one `estimate` run.
struct EstimateReport {
  std::vector<std::string> terms;
  Eigen::VectorXd beta;
  double level = 0.95;
  std::size_t n_dyads = 0;
  bool fixed_effects = false;
  std::vector<VarianceEstimate> variances;
  // cis[e][k]: interval for coefficient k under variances[e].
  std::vector<std::vector<ConfidenceInterval>> cis;
};

// CSV output carries full precision; text output is fixed-width with four
// decimals.
void emit_table(std::ostream& out, const McTable& table, TableFormat format);
void emit_table(std::ostream& out, const EstimateReport& report,
                TableFormat format);
void emit_table(std::ostream& out, const DensenessReport& report,
                TableFormat format);
void emit_table(std::ostream& out, const GraphStats& stats, TableFormat format);

// Per-replication standard errors and coverage flags, for external plots.
void emit_replications(std::ostream& out,
                       const std::vector<ReplicationRecord>& records);

// Opens `path` for writing, runs `write`, and reports unwritable paths as
// std::runtime_error naming the path.
void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& write);

// Shortest round-trippable decimal form.
std::string format_full(double v);
std::string format_fixed(double v, int decimals = 4);

}  // namespace netdyad
