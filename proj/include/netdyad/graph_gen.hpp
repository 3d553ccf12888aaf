#pragma once

#include <cstdint>
#include <string>

#include "netdyad/dyad_graph.hpp"
#include "netdyad/rng.hpp"

namespace netdyad {

enum class GraphKind { kBarabasiAlbert, kErdosRenyi };

// Random network design. `param` is the number of edges per attached node
// for Barabási–Albert (integer >= 1) or the expected-degree scale lambda
// for Erdős–Rényi (edge probability lambda / n_nodes).
struct GraphSpec {
  GraphKind kind = GraphKind::kErdosRenyi;
  std::size_t n_nodes = 0;
  double param = 1.0;
  std::uint64_t seed = 0;
  // Edge probability of the Erdős–Rényi seed component of a Barabási–Albert
  // graph is seed_lambda / ba_seed_size(n_nodes).
  double seed_lambda = 1.0;

  void validate() const;
};

GraphKind parse_graph_kind(const std::string& name);
std::string graph_kind_name(GraphKind kind);

// Nodes in the Erdős–Rényi seed of a Barabási–Albert graph: the smallest
// integer strictly above 5 * sqrt(n_nodes).
std::size_t ba_seed_size(std::size_t n_nodes);

// Each of the C(N, 2) pairs is present independently with probability
// lambda / N. Pairs are enumerated with geometric skips, so the cost is
// proportional to the number of edges drawn.
NodeGraph erdos_renyi(const GraphSpec& spec);
NodeGraph erdos_renyi(std::size_t n_nodes, double p, Rng& rng);

// Erdős–Rényi seed on ba_seed_size(N) nodes, then every remaining node
// attaches `param` edges to distinct earlier nodes chosen with probability
// proportional to degree. Nodes of degree zero are reachable only once no
// positive-degree candidate is left, in which case the remaining targets are
// drawn uniformly among unchosen earlier nodes.
NodeGraph barabasi_albert(const GraphSpec& spec);

NodeGraph generate_graph(const GraphSpec& spec);
NodeGraph generate_graph(const GraphSpec& spec, Rng& rng);

// Degree summary at the node and dyad level.
struct GraphStats {
  std::size_t n_nodes = 0;
  std::size_t node_max_degree = 0;
  double node_average_degree = 0.0;
  std::size_t n_dyads = 0;
  std::size_t dyad_max_degree = 0;
  double dyad_average_degree = 0.0;
};

GraphStats graph_stats(const NodeGraph& graph, const DyadNetwork& net);

}  // namespace netdyad
