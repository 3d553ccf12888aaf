#include "netdyad/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "netdyad/error.hpp"

namespace netdyad {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_record(const std::string& line,
                                      const std::string& source,
                                      std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      cells.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ValidationError(where(source, line_no) + "unterminated quote");
  cells.push_back(was_quoted ? cur : trim(cur));
  return cells;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::uint64_t parse_node_id(const std::string& cell, const std::string& source,
                            std::size_t line, const char* column) {
  std::uint64_t v = 0;
  const auto* end = cell.data() + cell.size();
  const auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || p != end) {
    throw ValidationError(where(source, line) + "column " + column +
                          ": expected a nonnegative integer node id, got '" +
                          cell + "'");
  }
  if (v >= std::numeric_limits<NodeId>::max()) {
    throw ValidationError(where(source, line) + "node id " + cell + " too large");
  }
  return v;
}

double parse_number(const std::string& cell, const std::string& source,
                    std::size_t line, const std::string& column) {
  if (cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" ||
      cell == "nan") {
    throw ValidationError(where(source, line) + "missing value in column '" +
                          column + "'");
  }
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const char* start = cell.data();
  if (*start == '+') ++start;
  const auto [p, ec] = std::from_chars(start, end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw ValidationError(where(source, line) + "column '" + column +
                          "': not a finite number: '" + cell + "'");
  }
  return v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out << ',';
    out << csv_escape(cells[k]);
  }
  out << '\n';
}

// Fixed-width text table: first column left aligned, the rest right aligned.
void write_text_table(std::ostream& out,
                      const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c == 0) {
        line += r[c] + pad;
      } else {
        line += "  " + pad + r[c];
      }
    }
    out << line << '\n';
  }
}

}  // namespace

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "text") return TableFormat::kText;
  throw ValidationError("unknown format '" + name + "' (expected csv or text)");
}

std::string format_full(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_record(line, source, line_no);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(where(source, line_no) + "expected " +
                            std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(cells.size()));
    }
    t.rows.push_back({line_no, std::move(cells)});
  }
  if (!have_header) throw ValidationError(source + ": empty file (missing header)");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_csv(in, path.string());
}

NodeGraph parse_edge_csv(std::istream& in, const std::string& source) {
  const CsvTable t = read_csv(in, source);
  if (t.header != std::vector<std::string>{"i", "j"}) {
    throw ValidationError(source + ":1: expected header 'i,j'");
  }
  std::vector<NodePair> edges;
  edges.reserve(t.rows.size());
  std::vector<std::size_t> lines;
  lines.reserve(t.rows.size());
  std::uint64_t max_id = 0;
  for (const auto& row : t.rows) {
    const auto i = parse_node_id(row.cells[0], source, row.line, "i");
    const auto j = parse_node_id(row.cells[1], source, row.line, "j");
    if (i == j) {
      throw ValidationError(where(source, row.line) + "self-loop (" +
                            row.cells[0] + ", " + row.cells[1] + ")");
    }
    max_id = std::max({max_id, i, j});
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    lines.push_back(row.line);
  }
  // Duplicate detection with line numbers; NodeGraph repeats the check.
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  auto canon = [&](std::size_t k) {
    return NodePair::canonical(edges[k].i, edges[k].j);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return canon(a) < canon(b); });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (canon(order[k]) == canon(order[k - 1])) {
      const auto& e = edges[order[k]];
      throw ValidationError(where(source, lines[order[k]]) + "duplicate edge (" +
                            std::to_string(e.i) + ", " + std::to_string(e.j) +
                            "), first seen on line " +
                            std::to_string(lines[order[k - 1]]));
    }
  }
  const std::size_t n_nodes = edges.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;
  return NodeGraph(n_nodes, std::move(edges));
}

NodeGraph parse_edge_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_edge_csv(in, path.string());
}

void write_edge_csv(std::ostream& out, const NodeGraph& graph) {
  std::vector<NodePair> edges = graph.edges();
  std::sort(edges.begin(), edges.end());
  out << "i,j\n";
  for (const auto& e : edges) out << e.i << ',' << e.j << '\n';
}

RegressionData parse_dyadic_csv(std::istream& in, const std::string& source,
                                const DyadIndex& idx) {
  const CsvTable t = read_csv(in, source);
  const auto& h = t.header;
  if (h.size() < 4 || h[0] != "dyad_id" || h[1] != "i" || h[2] != "j" ||
      h[3] != "y") {
    throw ValidationError(source +
                          ":1: expected header 'dyad_id,i,j,y,x1,...,xK[,group]'");
  }
  const bool has_group = h.back() == "group";
  const std::size_t first_x = 4;
  const std::size_t end_x = h.size() - (has_group ? 1 : 0);
  const std::size_t k = end_x - first_x;

  const auto m = static_cast<Eigen::Index>(t.rows.size());
  RegressionData data;
  data.y.resize(m);
  data.X.resize(m, static_cast<Eigen::Index>(k));
  data.column_names.assign(h.begin() + first_x, h.begin() + end_x);
  data.dyad_ids.resize(t.rows.size());
  if (has_group) data.group_ids.emplace(t.rows.size());

  std::vector<std::size_t> line_of_dyad(idx.size(), 0);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& row = t.rows[r];
    const auto& c = row.cells;
    std::int64_t label = 0;
    {
      const auto* end = c[0].data() + c[0].size();
      const auto [p, ec] = std::from_chars(c[0].data(), end, label);
      if (c[0].empty() || ec != std::errc() || p != end) {
        throw ValidationError(where(source, row.line) +
                              "dyad_id must be an integer, got '" + c[0] + "'");
      }
    }
    const auto i = parse_node_id(c[1], source, row.line, "i");
    const auto j = parse_node_id(c[2], source, row.line, "j");
    const auto id = idx.find(static_cast<NodeId>(i), static_cast<NodeId>(j));
    if (i >= idx.n_nodes() || j >= idx.n_nodes() || !id) {
      throw ValidationError(where(source, row.line) + "unknown dyad (" + c[1] +
                            ", " + c[2] + ") is not an edge of the network");
    }
    if (line_of_dyad[*id] != 0) {
      throw ValidationError(where(source, row.line) + "dyad (" + c[1] + ", " +
                            c[2] + ") repeats line " +
                            std::to_string(line_of_dyad[*id]));
    }
    line_of_dyad[*id] = row.line;
    data.dyad_ids[r] = *id;
    data.y(r) = parse_number(c[3], source, row.line, "y");
    for (std::size_t x = 0; x < k; ++x) {
      data.X(r, static_cast<Eigen::Index>(x)) =
          parse_number(c[first_x + x], source, row.line, h[first_x + x]);
    }
    if (has_group) {
      const auto& g = c.back();
      std::int64_t gv = 0;
      const auto* end = g.data() + g.size();
      const auto [p, ec] = std::from_chars(g.data(), end, gv);
      if (g.empty() || ec != std::errc() || p != end) {
        throw ValidationError(where(source, row.line) +
                              "group must be an integer, got '" + g + "'");
      }
      (*data.group_ids)[r] = gv;
    }
  }
  if (t.rows.size() != idx.size()) {
    throw ValidationError(source + ": " + std::to_string(t.rows.size()) +
                          " data rows but the network has " +
                          std::to_string(idx.size()) + " active dyads");
  }
  return data;
}

RegressionData parse_dyadic_csv(const std::filesystem::path& path,
                                const DyadIndex& idx) {
  auto in = open_input(path);
  return parse_dyadic_csv(in, path.string(), idx);
}

void write_dyadic_csv(std::ostream& out, const DyadIndex& idx,
                      const RegressionData& data) {
  data.validate();
  std::vector<std::string> header = {"dyad_id", "i", "j", "y"};
  const Eigen::Index first = data.has_intercept ? 1 : 0;
  for (Eigen::Index c = first; c < data.X.cols(); ++c) {
    header.push_back(data.column_names.empty()
                         ? "x" + std::to_string(c - first + 1)
                         : data.column_names[static_cast<std::size_t>(c)]);
  }
  if (data.group_ids) header.push_back("group");
  write_csv_row(out, header);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const auto& d = idx.dyad(data.dyad_ids[r]);
    std::vector<std::string> cells = {std::to_string(data.dyad_ids[r]),
                                      std::to_string(d.i), std::to_string(d.j),
                                      format_full(data.y(ri))};
    for (Eigen::Index c = first; c < data.X.cols(); ++c) {
      cells.push_back(format_full(data.X(ri, c)));
    }
    if (data.group_ids) cells.push_back(std::to_string((*data.group_ids)[r]));
    write_csv_row(out, cells);
  }
}

void emit_table(std::ostream& out, const McTable& table, TableFormat format) {
  if (format == TableFormat::kCsv) {
    write_csv_row(out, {"estimator", "coverage", "avg_length", "mean_se",
                        "bias_pct", "empirical_se", "psd_repairs"});
    for (const auto& e : table.estimators) {
      write_csv_row(out, {estimator_name(e.kind), format_full(e.coverage),
                          format_full(e.avg_length), format_full(e.mean_se),
                          format_full(e.bias_pct), format_full(table.empirical_se),
                          std::to_string(e.psd_repairs)});
    }
    return;
  }
  const auto& c = table.config;
  out << "spec=" << graph_kind_name(c.graph.kind)
      << " param=" << format_full(c.graph.param) << " N=" << c.graph.n_nodes
      << " S=" << c.max_spillover << " gamma=" << format_full(c.gamma)
      << " reps=" << table.reps_completed << " kernel=" << c.kernel.name()
      << " bandwidth=" << (c.bandwidth ? format_full(*c.bandwidth) : "auto")
      << " level=" << format_full(c.level) << " seed=" << c.seed << '\n';
  std::vector<std::vector<std::string>> rows = {
      {"estimator", "coverage", "avg_length", "mean_se", "bias_pct",
       "psd_repairs"}};
  for (const auto& e : table.estimators) {
    rows.push_back({estimator_name(e.kind), format_fixed(e.coverage),
                    format_fixed(e.avg_length), format_fixed(e.mean_se),
                    format_fixed(e.bias_pct, 2), std::to_string(e.psd_repairs)});
  }
  write_text_table(out, rows);
  out << "empirical_se=" << format_fixed(table.empirical_se)
      << " mean_beta=" << format_fixed(table.mean_beta)
      << " mean_dyads=" << format_fixed(table.mean_dyads, 1)
      << " failed=" << table.reps_failed << " redraws=" << table.redraws << '\n';
}

void emit_table(std::ostream& out, const EstimateReport& report,
                TableFormat format) {
  const auto k = report.terms.size();
  if (format == TableFormat::kCsv) {
    write_csv_row(out, {"term", "estimator", "beta", "se", "ci_lo", "ci_hi",
                        "bandwidth", "psd_repaired"});
    for (std::size_t e = 0; e < report.variances.size(); ++e) {
      const auto& v = report.variances[e];
      for (std::size_t t = 0; t < k; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        write_csv_row(out, {report.terms[t], estimator_name(v.kind),
                            format_full(report.beta(ti)),
                            format_full(std::sqrt(std::max(0.0, v.matrix(ti, ti)))),
                            format_full(report.cis[e][t].lo),
                            format_full(report.cis[e][t].hi),
                            v.bandwidth ? format_full(*v.bandwidth) : "",
                            v.psd_repaired ? "1" : "0"});
      }
    }
    return;
  }
  out << "dyads=" << report.n_dyads
      << " fixed_effects=" << (report.fixed_effects ? "yes" : "no")
      << " level=" << format_full(report.level) << '\n';
  out << "Panel A: parameter estimates\n";
  std::vector<std::vector<std::string>> a = {{"term", "estimate"}};
  for (std::size_t t = 0; t < k; ++t) {
    a.push_back({report.terms[t],
                 format_fixed(report.beta(static_cast<Eigen::Index>(t)))});
  }
  write_text_table(out, a);
  out << "Panel B: standard errors\n";
  std::vector<std::string> head = {"estimator"};
  for (const auto& t : report.terms) head.push_back(t);
  std::vector<std::vector<std::string>> b = {head};
  for (const auto& v : report.variances) {
    std::string label = estimator_name(v.kind);
    if (v.bandwidth) {
      label += " (" + v.kernel->name() + ", b=" + format_fixed(*v.bandwidth, 2) + ")";
    }
    if (v.psd_repaired) label += " [psd+" + format_full(v.psd_epsilon) + "]";
    std::vector<std::string> row = {label};
    for (std::size_t t = 0; t < k; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      row.push_back(format_fixed(std::sqrt(std::max(0.0, v.matrix(ti, ti)))));
    }
    b.push_back(row);
  }
  write_text_table(out, b);
}

void emit_table(std::ostream& out, const DensenessReport& report,
                TableFormat format) {
  double delta_sum = 0.0;
  for (const auto& r : report.rows) delta_sum += r.delta_k2;
  if (format == TableFormat::kCsv) {
    write_csv_row(out, {"s", "shell_density_k1", "delta_k2", "composite_k2"});
    for (const auto& r : report.rows) {
      write_csv_row(out, {std::to_string(r.s), format_full(r.shell_density_k1),
                          format_full(r.delta_k2), format_full(r.composite_k2)});
    }
    write_csv_row(out, {"sum", format_full(report.sum_shell_density),
                        format_full(delta_sum),
                        format_full(report.scaled_composite_sum)});
    return;
  }
  out << "dyads=" << report.n_dyads << " bandwidth=" << format_fixed(report.bandwidth)
      << " radius=" << report.radius << " diameter=" << report.diameter
      << " max_s=" << report.max_s << '\n';
  std::vector<std::vector<std::string>> rows = {
      {"s", "shell_density_k1", "delta_k2", "composite_k2"}};
  for (const auto& r : report.rows) {
    rows.push_back({std::to_string(r.s), format_fixed(r.shell_density_k1),
                    format_fixed(r.delta_k2), format_fixed(r.composite_k2)});
  }
  write_text_table(out, rows);
  out << "sum_s shell_density(s;1) = " << format_fixed(report.sum_shell_density)
      << '\n'
      << "(1/M) sum_s composite(s,b;2) = "
      << format_fixed(report.scaled_composite_sum) << '\n'
      << "note: " << DensenessReport::kEmptyShellConvention << '\n';
}

void emit_table(std::ostream& out, const GraphStats& stats, TableFormat format) {
  if (format == TableFormat::kCsv) {
    write_csv_row(out, {"n_nodes", "node_d_max", "node_d_ave", "d_act",
                        "dyad_d_max", "dyad_d_ave"});
    write_csv_row(out, {std::to_string(stats.n_nodes),
                        std::to_string(stats.node_max_degree),
                        format_full(stats.node_average_degree),
                        std::to_string(stats.n_dyads),
                        std::to_string(stats.dyad_max_degree),
                        format_full(stats.dyad_average_degree)});
    return;
  }
  write_text_table(out, {{"level", "count", "d_max", "d_ave"},
                         {"nodes", std::to_string(stats.n_nodes),
                          std::to_string(stats.node_max_degree),
                          format_fixed(stats.node_average_degree)},
                         {"dyads", std::to_string(stats.n_dyads),
                          std::to_string(stats.dyad_max_degree),
                          format_fixed(stats.dyad_average_degree)}});
}

void emit_replications(std::ostream& out,
                       const std::vector<ReplicationRecord>& records) {
  write_csv_row(out, {"rep", "ok", "attempts", "n_dyads", "beta_hat", "bandwidth",
                      "se_ehw", "se_dyadic", "se_network", "covered_ehw",
                      "covered_dyadic", "covered_network"});
  for (const auto& r : records) {
    std::vector<std::string> cells = {
        std::to_string(r.rep), r.ok ? "1" : "0", std::to_string(r.attempts),
        std::to_string(r.n_dyads), format_full(r.beta_hat),
        format_full(r.bandwidth)};
    for (const auto& e : r.estimators) cells.push_back(format_full(e.se));
    for (const auto& e : r.estimators) cells.push_back(e.covered ? "1" : "0");
    write_csv_row(out, cells);
  }
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace netdyad
