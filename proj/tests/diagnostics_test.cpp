#include "netdyad/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "netdyad/error.hpp"
#include "support.hpp"

namespace netdyad {
namespace {

DyadNetwork triangle() {
  return DyadNetwork{DyadIndex(NodeGraph(3, {{0, 1}, {1, 2}, {0, 2}}))};
}

DyadNetwork isolated(std::size_t pairs) {
  std::vector<NodePair> edges;
  for (NodeId p = 0; p < pairs; ++p) edges.push_back({2 * p, 2 * p + 1});
  return DyadNetwork{DyadIndex(NodeGraph(2 * pairs, edges))};
}

struct OracleProfile {
  std::vector<double> shell_size;
  std::vector<double> max_difference;
};

OracleProfile oracle_profile(const std::vector<std::vector<std::uint32_t>>& d,
                             std::uint32_t s, std::uint32_t r) {
  OracleProfile p;
  for (std::size_t m = 0; m < d.size(); ++m) {
    const auto shell = testing::oracle_shell(d, m, s);
    const auto ball = testing::oracle_ball(d, m, r);
    double best = 0.0;
    for (std::size_t other : shell) {
      const auto inner = testing::oracle_ball(d, other, static_cast<long>(s) - 1);
      std::size_t diff = 0;
      for (std::size_t x : ball) diff += inner.count(x) == 0;
      best = std::max(best, static_cast<double>(diff));
    }
    p.shell_size.push_back(static_cast<double>(shell.size()));
    p.max_difference.push_back(best);
  }
  return p;
}

double mean_pow(const std::vector<double>& v, double k) {
  double t = 0.0;
  for (double x : v) t += std::pow(x, k);
  return t / static_cast<double>(v.size());
}

TEST(ShellDensityTest, Examples) {
  const DyadNetwork k3 = triangle();
  EXPECT_EQ(shell_density(k3, 0, 3.7), 1.0);
  EXPECT_EQ(shell_density(k3, 1, 1.0), 2.0);
  EXPECT_EQ(shell_density(k3, 2, 1.0), 0.0);
  EXPECT_EQ(shell_density(isolated(4), 0, 0.5), 1.0);
  EXPECT_THROW(shell_density(k3, 1, 0.0), ValidationError);
}

TEST(DeltaDensityTest, Examples) {
  const DyadNetwork k3 = triangle();
  EXPECT_EQ(delta_density(k3, 0, 1, 1.0), 3.0);
  EXPECT_EQ(delta_density(isolated(5), 1, 1, 1.0), 0.0);
  // Shell 1 of each K3 dyad is the other two; N(m'; 0) = {m'} removes one.
  EXPECT_EQ(delta_density(k3, 1, 1, 1.0), 2.0);
}

TEST(CompositeDensityTest, Examples) {
  // Every shell-0 has size 1 and isolated dyads have a 1-ball of size 1.
  const DyadNetwork iso = isolated(6);
  for (double a : default_alpha_grid()) {
    EXPECT_NEAR(composite_density(iso, 0, 1, 2.0, {a}), 1.0, 1e-15);
  }
  const DyadNetwork k3 = triangle();
  const double single = composite_density(k3, 1, 1, 1.0, {2.0});
  EXPECT_NEAR(single,
              std::sqrt(delta_density(k3, 1, 1, 2.0)) * std::sqrt(shell_density(k3, 1, 2.0)),
              1e-14);
  EXPECT_THROW(composite_density(k3, 1, 1, 1.0, {1.0}), ValidationError);
  EXPECT_THROW(composite_density(k3, 1, 1, 1.0, {}), ValidationError);
}

TEST(AlphaGridTest, Shape) {
  const auto g = default_alpha_grid();
  ASSERT_EQ(g.size(), 40u);
  EXPECT_GT(g.front(), 1.01);
  EXPECT_EQ(g.back(), 8.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_GT(g[i], g[i - 1]);
    if (i + 1 < g.size()) {
      EXPECT_NEAR(std::log(g[i] / g[i - 1]), std::log(g[1] / g[0]), 1e-12);
    }
  }
}

class DiagnosticsOracleTest : public ::testing::TestWithParam<int> {};

TEST_P(DiagnosticsOracleTest, MatchesEnumeration) {
  Rng rng = Rng::substream(4242, static_cast<std::uint64_t>(GetParam()));
  const DyadNetwork net{DyadIndex(testing::random_small_graph(rng, 14, 30))};
  const auto d = testing::floyd_warshall(net.index());
  const std::vector<double> grid = default_alpha_grid();
  for (std::uint32_t s = 0; s <= 4; ++s) {
    for (std::uint32_t r = 0; r <= 3; ++r) {
      const OracleProfile want = oracle_profile(d, s, r);
      const ShellProfile got = shell_profile(net, s, r, 2);
      for (std::size_t m = 0; m < net.size(); ++m) {
        ASSERT_EQ(static_cast<double>(got.shell_size[m]), want.shell_size[m]);
        ASSERT_EQ(static_cast<double>(got.max_difference[m]), want.max_difference[m])
            << "m " << m << " s " << s << " r " << r;
      }
      EXPECT_NEAR(shell_density(net, s, 1.5), mean_pow(want.shell_size, 1.5), 1e-12);
      EXPECT_NEAR(delta_density(net, s, r, 2.0), mean_pow(want.max_difference, 2.0), 1e-9);
      double best = INFINITY;
      for (double a : grid) {
        best = std::min(best, std::pow(mean_pow(want.max_difference, 2.0 * a), 1.0 / a) *
                                  std::pow(mean_pow(want.shell_size, a / (a - 1)), (a - 1) / a));
      }
      EXPECT_NEAR(composite_density(net, s, r, 2.0, grid), best, 1e-9 * std::max(1.0, best));
    }
  }
}

TEST_P(DiagnosticsOracleTest, ShellsPartitionComponents) {
  Rng rng = Rng::substream(99, static_cast<std::uint64_t>(GetParam()));
  const DyadNetwork net{DyadIndex(testing::random_small_graph(rng, 16, 30))};
  const auto d = testing::floyd_warshall(net.index());
  double component_mean = 0.0;
  for (std::size_t m = 0; m < net.size(); ++m) {
    component_mean += static_cast<double>(testing::oracle_ball(d, m, 1 << 20).size());
  }
  component_mean /= static_cast<double>(net.size());
  DensenessOptions opts;
  const DensenessReport rep = denseness_report(net, 2.0, opts);
  EXPECT_NEAR(rep.sum_shell_density, component_mean, 1e-12);
  EXPECT_EQ(rep.rows.front().shell_density_k1, 1.0);
  // Composition of per-operation calls.
  double comp = 0.0;
  for (const auto& row : rep.rows) {
    EXPECT_DOUBLE_EQ(row.shell_density_k1, shell_density(net, row.s, 1.0));
    EXPECT_DOUBLE_EQ(row.delta_k2, delta_density(net, row.s, 2, 2.0));
    EXPECT_DOUBLE_EQ(row.composite_k2, composite_density(net, row.s, 2, 2.0, opts.alpha_grid));
    EXPECT_TRUE(std::isfinite(row.composite_k2));
    EXPECT_GE(row.delta_k2, 0.0);
    comp += row.composite_k2;
  }
  EXPECT_NEAR(rep.scaled_composite_sum, comp / static_cast<double>(net.size()), 1e-12);
}

TEST_P(DiagnosticsOracleTest, GridMinimumCloseToFineScan) {
  Rng rng = Rng::substream(7, static_cast<std::uint64_t>(GetParam()));
  const DyadNetwork net{DyadIndex(testing::random_small_graph(rng, 14, 30))};
  std::vector<double> fine(1000);
  for (int i = 0; i < 1000; ++i) {
    fine[i] = std::exp(std::log(1.01) + (std::log(8.0) - std::log(1.01)) * (i + 1) / 1000.0);
  }
  for (std::uint32_t s = 1; s <= 3; ++s) {
    const ShellProfile p = shell_profile(net, s, 2);
    const double coarse = p.composite_density(2.0, default_alpha_grid());
    const double refined = p.composite_density(2.0, fine);
    EXPECT_LE(refined, coarse * (1 + 1e-12));
    EXPECT_LE(coarse, refined * 1.01 + 1e-300) << "s " << s;
  }
}

TEST_P(DiagnosticsOracleTest, RelabelingInvariance) {
  Rng rng = Rng::substream(555, static_cast<std::uint64_t>(GetParam()));
  const NodeGraph g = testing::random_small_graph(rng, 14, 30);
  std::vector<NodeId> perm(g.n_nodes());
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  std::vector<NodePair> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.i], perm[e.j]});
  const DyadNetwork a{DyadIndex(g)};
  const DyadNetwork b{DyadIndex(NodeGraph(g.n_nodes(), edges))};
  const DensenessReport ra = denseness_report(a, 2.0);
  const DensenessReport rb = denseness_report(b, 2.0);
  ASSERT_EQ(ra.rows.size(), rb.rows.size());
  for (std::size_t i = 0; i < ra.rows.size(); ++i) {
    EXPECT_NEAR(ra.rows[i].shell_density_k1, rb.rows[i].shell_density_k1, 1e-12);
    EXPECT_NEAR(ra.rows[i].delta_k2, rb.rows[i].delta_k2, 1e-9);
    EXPECT_NEAR(ra.rows[i].composite_k2, rb.rows[i].composite_k2, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomGraphs, DiagnosticsOracleTest, ::testing::Range(0, 25));

TEST(DensenessReportTest, Triangle) {
  const DensenessReport rep = denseness_report(triangle(), 2.0, {.max_s = 5});
  EXPECT_EQ(rep.diameter, 1u);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].shell_density_k1, 1.0);
  EXPECT_EQ(rep.rows[1].shell_density_k1, 2.0);
  EXPECT_EQ(rep.sum_shell_density, 3.0);
  EXPECT_EQ(rep.radius, 2u);
}

TEST(DensenessReportTest, IsolatedDyads) {
  const DensenessReport rep = denseness_report(isolated(4), 3.0);
  EXPECT_EQ(rep.diameter, 0u);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.sum_shell_density, 1.0);
  // Only s = 0 contributes and every term there is 1.
  EXPECT_NEAR(rep.scaled_composite_sum, 1.0 / 4.0, 1e-15);
}

TEST(DensenessReportTest, ThreadCountInvariant) {
  Rng rng(3);
  const DyadNetwork net{DyadIndex(testing::random_small_graph(rng, 40, 200))};
  DensenessOptions one, many;
  many.threads = 5;
  const auto a = denseness_report(net, 2.0, one);
  const auto b = denseness_report(net, 2.0, many);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].delta_k2, b.rows[i].delta_k2);
    EXPECT_EQ(a.rows[i].composite_k2, b.rows[i].composite_k2);
  }
}

}  // namespace
}  // namespace netdyad
