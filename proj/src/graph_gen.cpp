#include "netdyad/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "netdyad/error.hpp"

namespace netdyad {

namespace {

constexpr std::uint64_t kPhaseSeedGraph = 1;
constexpr std::uint64_t kPhaseAttachment = 2;

}  // namespace

void GraphSpec::validate() const {
  if (!std::isfinite(param)) throw ValidationError("graph parameter must be finite");
  if (kind == GraphKind::kErdosRenyi) {
    if (n_nodes < 1) throw ValidationError("Erdős–Rényi graph needs n_nodes >= 1");
    if (!(param > 0.0)) throw ValidationError("Erdős–Rényi lambda must be > 0");
    if (param / static_cast<double>(n_nodes) > 1.0) {
      throw ValidationError("Erdős–Rényi lambda / N must be <= 1");
    }
  } else {
    if (param < 1.0 || param != std::floor(param)) {
      throw ValidationError("Barabási–Albert nu must be an integer >= 1");
    }
    const std::size_t seed_nodes = ba_seed_size(n_nodes);
    if (n_nodes <= seed_nodes) {
      throw ValidationError("Barabási–Albert graph with N = " +
                            std::to_string(n_nodes) +
                            " leaves no nodes to attach after the seed of " +
                            std::to_string(seed_nodes));
    }
    if (static_cast<std::size_t>(param) >= seed_nodes) {
      throw ValidationError("Barabási–Albert nu must be below the seed size");
    }
    if (!(seed_lambda >= 0.0) ||
        seed_lambda / static_cast<double>(seed_nodes) > 1.0) {
      throw ValidationError("seed lambda must lie in [0, seed size]");
    }
  }
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "ba" || name == "barabasi_albert") return GraphKind::kBarabasiAlbert;
  if (name == "er" || name == "erdos_renyi") return GraphKind::kErdosRenyi;
  throw ValidationError("unknown graph kind '" + name + "' (expected ba or er)");
}

std::string graph_kind_name(GraphKind kind) {
  return kind == GraphKind::kBarabasiAlbert ? "ba" : "er";
}

std::size_t ba_seed_size(std::size_t n_nodes) {
  return static_cast<std::size_t>(
             std::floor(5.0 * std::sqrt(static_cast<double>(n_nodes)))) + 1;
}

NodeGraph erdos_renyi(std::size_t n_nodes, double p, Rng& rng) {
  std::vector<NodePair> edges;
  if (n_nodes < 2 || p <= 0.0) return NodeGraph(n_nodes, std::move(edges));
  if (p >= 1.0) {
    for (NodeId i = 0; i < n_nodes; ++i)
      for (NodeId j = i + 1; j < n_nodes; ++j) edges.push_back({i, j});
    return NodeGraph(n_nodes, std::move(edges));
  }
  // Pairs (i, j), i < j, are visited in row-major order through a linear
  // index; the gap to the next included pair is geometric with parameter p.
  const double log_q = std::log1p(-p);
  const auto n = static_cast<std::uint64_t>(n_nodes);
  const std::uint64_t total = n * (n - 1) / 2;
  std::uint64_t row = 0;
  std::uint64_t row_start = 0;
  std::uint64_t row_len = n - 1;
  std::uint64_t k = 0;
  bool first = true;
  while (true) {
    const double gap = std::floor(std::log(rng.uniform_open_low()) / log_q);
    if (gap >= static_cast<double>(total)) break;
    const auto step = static_cast<std::uint64_t>(gap) + (first ? 0 : 1);
    first = false;
    if (step >= total - k) break;
    k += step;
    while (k >= row_start + row_len) {
      row_start += row_len;
      ++row;
      --row_len;
    }
    edges.push_back({static_cast<NodeId>(row),
                     static_cast<NodeId>(row + 1 + (k - row_start))});
  }
  return NodeGraph(n_nodes, std::move(edges));
}

NodeGraph erdos_renyi(const GraphSpec& spec) {
  Rng rng = Rng::substream(spec.seed, 0, kPhaseSeedGraph);
  GraphSpec er = spec;
  er.kind = GraphKind::kErdosRenyi;
  return generate_graph(er, rng);
}

namespace {

NodeGraph attach_preferentially(const GraphSpec& spec, Rng& seed_rng,
                                Rng& attach_rng) {
  const std::size_t n = spec.n_nodes;
  const std::size_t n_seed = ba_seed_size(n);
  const auto nu = static_cast<std::size_t>(spec.param);

  NodeGraph seed = erdos_renyi(
      n_seed, spec.seed_lambda / static_cast<double>(n_seed), seed_rng);
  std::vector<NodePair> edges = seed.edges();
  edges.reserve(edges.size() + nu * (n - n_seed));

  // Every edge endpoint appears once in `pool`, so a uniform pick from the
  // pool is a degree-proportional pick of a node.
  std::vector<NodeId> pool;
  pool.reserve(2 * edges.capacity());
  std::vector<std::size_t> degree(n, 0);
  std::size_t positive_degree_nodes = 0;
  for (const auto& e : edges) {
    for (NodeId v : {e.i, e.j}) {
      pool.push_back(v);
      if (degree[v]++ == 0) ++positive_degree_nodes;
    }
  }

  std::vector<NodeId> targets;
  std::vector<char> chosen(n, 0);
  for (std::size_t v = n_seed; v < n; ++v) {
    targets.clear();
    std::size_t chosen_with_degree = 0;
    while (targets.size() < nu) {
      NodeId t;
      if (chosen_with_degree < positive_degree_nodes) {
        t = pool[attach_rng.below(pool.size())];
      } else {
        t = static_cast<NodeId>(attach_rng.below(v));
      }
      if (chosen[t]) continue;
      chosen[t] = 1;
      if (degree[t] > 0) ++chosen_with_degree;
      targets.push_back(t);
    }
    for (NodeId t : targets) {
      chosen[t] = 0;
      edges.push_back(NodePair::canonical(t, static_cast<NodeId>(v)));
      for (NodeId u : {t, static_cast<NodeId>(v)}) {
        pool.push_back(u);
        if (degree[u]++ == 0) ++positive_degree_nodes;
      }
    }
  }
  return NodeGraph(n, std::move(edges));
}

}  // namespace

NodeGraph barabasi_albert(const GraphSpec& spec) {
  GraphSpec ba = spec;
  ba.kind = GraphKind::kBarabasiAlbert;
  Rng rng = Rng::substream(spec.seed, 0, kPhaseSeedGraph);
  return generate_graph(ba, rng);
}

NodeGraph generate_graph(const GraphSpec& spec) {
  Rng rng = Rng::substream(spec.seed, 0, kPhaseSeedGraph);
  return generate_graph(spec, rng);
}

NodeGraph generate_graph(const GraphSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.kind == GraphKind::kErdosRenyi) {
    return erdos_renyi(spec.n_nodes,
                       spec.param / static_cast<double>(spec.n_nodes), rng);
  }
  // The attachment phase gets its own stream derived from the caller's
  // generator so the seed component and the attachment draws are separable.
  Rng attach_rng = Rng::substream(rng.next_u64(), 0, kPhaseAttachment);
  return attach_preferentially(spec, rng, attach_rng);
}

GraphStats graph_stats(const NodeGraph& graph, const DyadNetwork& net) {
  GraphStats st;
  st.n_nodes = graph.n_nodes();
  const auto deg = graph.degrees();
  if (!deg.empty()) {
    st.node_max_degree = *std::max_element(deg.begin(), deg.end());
    st.node_average_degree = 2.0 * static_cast<double>(graph.n_edges()) /
                             static_cast<double>(graph.n_nodes());
  }
  st.n_dyads = net.size();
  st.dyad_max_degree = net.max_degree();
  st.dyad_average_degree = net.average_degree();
  return st;
}

}  // namespace netdyad
