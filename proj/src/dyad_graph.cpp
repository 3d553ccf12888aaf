#include "netdyad/dyad_graph.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "netdyad/error.hpp"

namespace netdyad {

namespace {

std::string pair_name(NodeId a, NodeId b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

NodeGraph::NodeGraph(std::size_t n_nodes, std::vector<NodePair> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (auto& e : edges_) {
    if (e.i == e.j) {
      throw ValidationError("self-loop " + pair_name(e.i, e.j));
    }
    if (e.i >= n_nodes_ || e.j >= n_nodes_) {
      throw ValidationError("edge " + pair_name(e.i, e.j) +
                            " references a node outside [0, " +
                            std::to_string(n_nodes_) + ")");
    }
    const NodeId a = e.i, b = e.j;
    e = NodePair::canonical(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(e.i) << 32) | e.j;
    if (!seen.insert(key).second) {
      throw ValidationError("duplicate edge " + pair_name(a, b));
    }
  }
}

std::vector<std::size_t> NodeGraph::degrees() const {
  std::vector<std::size_t> deg(n_nodes_, 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

DyadIndex::DyadIndex(const NodeGraph& graph)
    : n_nodes_(graph.n_nodes()), dyads_(graph.edges()) {
  std::sort(dyads_.begin(), dyads_.end());
  lookup_.reserve(dyads_.size());
  for (DyadId m = 0; m < dyads_.size(); ++m) lookup_.emplace(key(dyads_[m]), m);
}

std::optional<DyadId> DyadIndex::find(NodeId a, NodeId b) const {
  if (a == b) return std::nullopt;
  const auto it = lookup_.find(key(NodePair::canonical(a, b)));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

DyadIndex build_dyad_index(const NodeGraph& graph) { return DyadIndex(graph); }

DyadNetwork::DyadNetwork(DyadIndex index) : index_(std::move(index)) {
  const std::size_t n_dyads = index_.size();
  const std::size_t n_nodes = index_.n_nodes();

  // Incidence lists: dyads touching each node, ascending by id.
  std::vector<std::size_t> inc_off(n_nodes + 1, 0);
  for (const auto& d : index_.dyads()) {
    ++inc_off[d.i + 1];
    ++inc_off[d.j + 1];
  }
  for (std::size_t v = 0; v < n_nodes; ++v) inc_off[v + 1] += inc_off[v];
  std::vector<DyadId> incident(inc_off.back());
  {
    std::vector<std::size_t> fill(inc_off.begin(), inc_off.end() - 1);
    for (DyadId m = 0; m < n_dyads; ++m) {
      const auto& d = index_.dyad(m);
      incident[fill[d.i]++] = m;
      incident[fill[d.j]++] = m;
    }
  }

  // Dyad m's neighbours are the other dyads incident to its two endpoints.
  // In a simple graph two distinct dyads share at most one node, so the two
  // incidence lists never contribute the same neighbour twice.
  offsets_.assign(n_dyads + 1, 0);
  for (DyadId m = 0; m < n_dyads; ++m) {
    const auto& d = index_.dyad(m);
    offsets_[m + 1] = offsets_[m] + (inc_off[d.i + 1] - inc_off[d.i] - 1) +
                      (inc_off[d.j + 1] - inc_off[d.j] - 1);
  }
  targets_.resize(offsets_.back());
  for (DyadId m = 0; m < n_dyads; ++m) {
    const auto& d = index_.dyad(m);
    auto out = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[m]);
    const auto first = out;
    for (NodeId v : {d.i, d.j}) {
      for (std::size_t k = inc_off[v]; k < inc_off[v + 1]; ++k) {
        if (incident[k] != m) *out++ = incident[k];
      }
    }
    std::sort(first, out);
  }
}

bool DyadNetwork::adjacent(DyadId a, DyadId b) const {
  check_id(a);
  check_id(b);
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

double DyadNetwork::average_degree() const {
  if (size() == 0) return 0.0;
  return static_cast<double>(targets_.size()) / static_cast<double>(size());
}

std::size_t DyadNetwork::max_degree() const {
  std::size_t best = 0;
  for (DyadId m = 0; m < size(); ++m) best = std::max(best, degree(m));
  return best;
}

void DyadNetwork::check_id(DyadId m) const {
  if (m >= size()) {
    throw ValidationError("dyad id " + std::to_string(m) +
                          " out of range [0, " + std::to_string(size()) + ")");
  }
}

DyadNetwork build_dyad_network(DyadIndex index) {
  return DyadNetwork(std::move(index));
}

ShellWalker::ShellWalker(const DyadNetwork& net)
    : net_(&net),
      stamp_(net.size(), 0),
      dist_(net.size(), 0),
      shell_offsets_{0, 0} {}

std::uint32_t ShellWalker::walk(DyadId source, std::uint32_t s_max) {
  net_->check_id(source);
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  order_.clear();
  shell_offsets_.assign(1, 0);

  order_.push_back(source);
  stamp_[source] = generation_;
  dist_[source] = 0;
  shell_offsets_.push_back(1);

  std::uint32_t s = 0;
  while (s < s_max) {
    const std::size_t lo = shell_offsets_[s];
    const std::size_t hi = shell_offsets_[s + 1];
    for (std::size_t k = lo; k < hi; ++k) {
      for (DyadId nb : net_->neighbors(order_[k])) {
        if (stamp_[nb] == generation_) continue;
        stamp_[nb] = generation_;
        dist_[nb] = s + 1;
        order_.push_back(nb);
      }
    }
    if (order_.size() == hi) break;
    ++s;
    shell_offsets_.push_back(order_.size());
  }
  return s;
}

std::span<const DyadId> ShellWalker::shell(std::uint32_t s) const {
  if (s + 1 >= shell_offsets_.size()) return {};
  return {order_.data() + shell_offsets_[s],
          order_.data() + shell_offsets_[s + 1]};
}

DyadDistance ShellWalker::distance_to(DyadId m) const {
  if (m >= stamp_.size() || stamp_[m] != generation_ || generation_ == 0) {
    return DyadDistance::unreached();
  }
  return DyadDistance(dist_[m]);
}

DyadDistance dyad_distance(const DyadNetwork& net, DyadId from, DyadId to,
                           std::uint32_t cap) {
  net.check_id(from);
  net.check_id(to);
  if (from == to) return DyadDistance(0);
  ShellWalker walker(net);
  walker.walk(from, cap);
  return walker.distance_to(to);
}

std::vector<std::vector<DyadId>> shells_up_to(const DyadNetwork& net,
                                              DyadId m, std::uint32_t s_max) {
  ShellWalker walker(net);
  walker.walk(m, s_max);
  std::vector<std::vector<DyadId>> shells(static_cast<std::size_t>(s_max) + 1);
  for (std::uint32_t s = 0; s <= walker.radius(); ++s) {
    const auto sh = walker.shell(s);
    shells[s].assign(sh.begin(), sh.end());
  }
  return shells;
}

}  // namespace netdyad
