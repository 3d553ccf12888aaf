#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace netdyad {

using NodeId = std::uint32_t;
using DyadId = std::uint32_t;

// Unordered node pair stored canonically with i < j.
struct NodePair {
  NodeId i = 0;
  NodeId j = 0;

  static NodePair canonical(NodeId a, NodeId b) {
    return a < b ? NodePair{a, b} : NodePair{b, a};
  }
  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

// Undirected simple graph over the sampling units.
//
// Construction validates the edge list: every id must be below n_nodes, and
// self-loops or repeated pairs (in either orientation) are rejected with a
// ValidationError naming the pair.
class NodeGraph {
 public:
  NodeGraph() = default;
  NodeGraph(std::size_t n_nodes, std::vector<NodePair> edges);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_edges() const { return edges_.size(); }
  // Edges in insertion order, each in canonical (min, max) orientation.
  const std::vector<NodePair>& edges() const { return edges_; }
  std::vector<std::size_t> degrees() const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<NodePair> edges_;
};

// Bijection between active dyads (edges of a NodeGraph) and ids [0, M).
// Ids follow the lexicographic order of (min node, max node).
class DyadIndex {
 public:
  DyadIndex() = default;
  explicit DyadIndex(const NodeGraph& graph);

  std::size_t size() const { return dyads_.size(); }
  std::size_t n_nodes() const { return n_nodes_; }
  const NodePair& dyad(DyadId m) const { return dyads_.at(m); }
  const std::vector<NodePair>& dyads() const { return dyads_; }
  std::optional<DyadId> find(NodeId a, NodeId b) const;

 private:
  static std::uint64_t key(NodePair p) {
    return (static_cast<std::uint64_t>(p.i) << 32) | p.j;
  }
  std::size_t n_nodes_ = 0;
  std::vector<NodePair> dyads_;
  std::unordered_map<std::uint64_t, DyadId> lookup_;
};

DyadIndex build_dyad_index(const NodeGraph& graph);

// The line graph of the node network: dyads are adjacent when they share a
// unit. Adjacency is stored in CSR form with each neighbour list sorted.
// Building costs sum over nodes of C(degree, 2) adjacency pairs.
//
// Immutable after construction; safe for concurrent readers.
class DyadNetwork {
 public:
  DyadNetwork() = default;
  explicit DyadNetwork(DyadIndex index);

  std::size_t size() const { return index_.size(); }
  const DyadIndex& index() const { return index_; }

  std::span<const DyadId> neighbors(DyadId m) const {
    return {targets_.data() + offsets_[m], targets_.data() + offsets_[m + 1]};
  }
  std::size_t degree(DyadId m) const { return offsets_[m + 1] - offsets_[m]; }
  bool adjacent(DyadId a, DyadId b) const;

  // Number of unordered adjacent dyad pairs.
  std::size_t n_adjacent_pairs() const { return targets_.size() / 2; }
  // Mean adjacency-list length; 0 for an empty network.
  double average_degree() const;
  std::size_t max_degree() const;

  void check_id(DyadId m) const;

 private:
  DyadIndex index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<DyadId> targets_;
};

DyadNetwork build_dyad_network(DyadIndex index);

// Geodesic distance between dyads; unreached() stands for +infinity or
// "beyond the search cap" when produced by a truncated search.
class DyadDistance {
 public:
  static constexpr std::uint32_t kUnreached =
      std::numeric_limits<std::uint32_t>::max();

  constexpr DyadDistance() = default;
  constexpr explicit DyadDistance(std::uint32_t hops) : hops_(hops) {}
  static constexpr DyadDistance unreached() { return DyadDistance{}; }

  constexpr bool reached() const { return hops_ != kUnreached; }
  constexpr std::uint32_t hops() const { return hops_; }
  friend constexpr bool operator==(DyadDistance, DyadDistance) = default;

 private:
  std::uint32_t hops_ = kUnreached;
};

// Truncated breadth-first search from one dyad, reporting shells (sets at
// exact distance s). Holds scratch buffers sized to the network, so one
// walker per thread; walkers never share mutable state.
class ShellWalker {
 public:
  explicit ShellWalker(const DyadNetwork& net);

  // Visits every dyad within distance s_max of `source`. Returns the largest
  // radius that produced a nonempty shell (the eccentricity of `source` when
  // s_max is not binding).
  std::uint32_t walk(DyadId source, std::uint32_t s_max);

  std::uint32_t radius() const {
    return static_cast<std::uint32_t>(shell_offsets_.size() - 2);
  }
  // Shell s of the last walk; empty for s beyond radius().
  std::span<const DyadId> shell(std::uint32_t s) const;
  // All dyads visited by the last walk, in BFS order.
  std::span<const DyadId> visited() const { return order_; }
  // Distance recorded by the last walk, unreached() if not visited.
  DyadDistance distance_to(DyadId m) const;

 private:
  const DyadNetwork* net_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> dist_;
  std::uint32_t generation_ = 0;
  std::vector<DyadId> order_;
  std::vector<std::size_t> shell_offsets_;
};

DyadDistance dyad_distance(const DyadNetwork& net, DyadId from, DyadId to,
                           std::uint32_t cap);

// shell[s] for s = 0..s_max (trailing shells may be empty).
std::vector<std::vector<DyadId>> shells_up_to(const DyadNetwork& net,
                                              DyadId m, std::uint32_t s_max);

}  // namespace netdyad
