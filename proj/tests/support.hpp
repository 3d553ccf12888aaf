#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "netdyad/dyad_graph.hpp"
#include "netdyad/regression.hpp"
#include "netdyad/rng.hpp"

namespace netdyad::testing {

inline constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

// Random simple graph with at most `max_edges` edges on up to `max_nodes`
// nodes. Mixes sparse and dense draws so both trees and cliques show up.
inline NodeGraph random_small_graph(Rng& rng, std::size_t max_nodes,
                                    std::size_t max_edges) {
  const std::size_t n = 2 + rng.below(max_nodes - 1);
  const double p = 0.05 + 0.6 * rng.uniform();
  std::vector<NodePair> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (edges.size() < max_edges && rng.uniform() < p) edges.push_back({i, j});
    }
  }
  if (edges.empty()) edges.push_back({0, 1});
  // Shuffle so construction order differs from sorted order.
  for (std::size_t k = edges.size(); k > 1; --k) {
    std::swap(edges[k - 1], edges[rng.below(k)]);
  }
  return NodeGraph(n, std::move(edges));
}

// All-pairs dyad distances by Floyd–Warshall on an adjacency rule that checks
// shared endpoints directly, without going through DyadNetwork.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(
    const DyadIndex& idx) {
  const std::size_t m = idx.size();
  std::vector<std::vector<std::uint32_t>> d(m, std::vector<std::uint32_t>(m, kInf));
  for (std::size_t a = 0; a < m; ++a) {
    d[a][a] = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto& p = idx.dyad(static_cast<DyadId>(a));
      const auto& q = idx.dyad(static_cast<DyadId>(b));
      if (p.i == q.i || p.i == q.j || p.j == q.i || p.j == q.j) d[a][b] = 1;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t a = 0; a < m; ++a) {
      if (d[a][k] == kInf) continue;
      for (std::size_t b = 0; b < m; ++b) {
        if (d[k][b] == kInf) continue;
        d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
      }
    }
  }
  return d;
}

inline std::set<std::size_t> oracle_ball(
    const std::vector<std::vector<std::uint32_t>>& d, std::size_t m,
    long radius) {
  std::set<std::size_t> out;
  if (radius < 0) return out;
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (d[m][b] != kInf && d[m][b] <= static_cast<std::uint32_t>(radius)) {
      out.insert(b);
    }
  }
  return out;
}

inline std::vector<std::size_t> oracle_shell(
    const std::vector<std::vector<std::uint32_t>>& d, std::size_t m,
    std::uint32_t s) {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (d[m][b] == s) out.push_back(b);
  }
  return out;
}

// Regression data aligned to dyad ids 0..M-1 with K random covariates.
inline RegressionData random_regression(Rng& rng, std::size_t m, std::size_t k) {
  RegressionData data;
  data.y.resize(static_cast<Eigen::Index>(m));
  data.X.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      data.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          c == 0 ? 1.0 + rng.normal() * 0.3 : rng.normal();
    }
    data.y(static_cast<Eigen::Index>(r)) = rng.normal() * 2.0;
    data.dyad_ids.push_back(static_cast<DyadId>(r));
  }
  for (std::size_t c = 0; c < k; ++c) data.column_names.push_back("x" + std::to_string(c + 1));
  return data;
}

// Relative error of a against b. A double sum that cancels to nearly zero
// (a connected graph with b past its diameter) is measured against floor.
inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            double floor = 0.0) {
  const double scale = std::max({b.norm(), floor, std::numeric_limits<double>::min()});
  return (a - b).norm() / scale;
}

}  // namespace netdyad::testing
