#include "netdyad/variance.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "netdyad/error.hpp"
#include "support.hpp"

namespace netdyad {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;

struct Instance {
  DyadNetwork net;
  OlsFit fit;
};

Instance random_instance(std::uint64_t seed, std::size_t max_nodes,
                         std::size_t max_edges, std::size_t max_k = 3) {
  Rng rng = Rng::substream(seed, 17);
  const NodeGraph g = testing::random_small_graph(rng, max_nodes, max_edges);
  DyadNetwork net{DyadIndex(g)};
  std::size_t k = 1 + rng.below(max_k);
  k = std::min(k, net.size());
  const RegressionData d = testing::random_regression(rng, net.size(), k);
  return {std::move(net), ols_fit(d)};
}

// Direct double sum over all dyad pairs with weights from oracle distances.
MatrixXd brute_force(const OlsFit& fit, const DyadNetwork& net, const Kernel& kernel,
                     double b) {
  const auto d = testing::floyd_warshall(net.index());
  const MatrixXd u = fit.scores_by_dyad(net.size());
  MatrixXd meat = MatrixXd::Zero(u.cols(), u.cols());
  for (std::size_t a = 0; a < net.size(); ++a) {
    for (std::size_t c = 0; c < net.size(); ++c) {
      if (d[a][c] == testing::kInf) continue;
      const double w = kernel(static_cast<double>(d[a][c]) / b);
      meat += w * u.row(static_cast<Index>(a)).transpose() * u.row(static_cast<Index>(c));
    }
  }
  return fit.bread * meat * fit.bread;
}

OlsFit hand_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& resid) {
  OlsFit fit;
  fit.data.X = x;
  fit.data.y = x + resid;
  for (Index r = 0; r < x.size(); ++r) fit.data.dyad_ids.push_back(static_cast<DyadId>(r));
  fit.beta = Eigen::VectorXd::Ones(1);
  fit.residuals = resid;
  fit.bread = MatrixXd::Constant(1, 1, 1.0 / x.squaredNorm());
  return fit;
}

TEST(KernelTest, Shapes) {
  const Kernel rect(KernelKind::kRectangular), bart(KernelKind::kBartlett);
  for (double z : {0.0, 0.3, 1.0, 1.0001, 3.0}) {
    EXPECT_EQ(rect(z), rect(-z));
    EXPECT_EQ(bart(z), bart(-z));
  }
  EXPECT_EQ(rect(0.0), 1.0);
  EXPECT_EQ(rect(1.0), 1.0);
  EXPECT_EQ(rect(1.01), 0.0);
  EXPECT_EQ(bart(0.0), 1.0);
  EXPECT_DOUBLE_EQ(bart(0.25), 0.75);
  EXPECT_EQ(bart(1.0), 0.0);
  EXPECT_EQ(bart(2.0), 0.0);
  EXPECT_EQ(Kernel::parse("bartlett").kind(), KernelKind::kBartlett);
  EXPECT_THROW(Kernel::parse("parzen"), ValidationError);
}

TEST(EhwTest, ZeroResiduals) {
  const OlsFit fit = hand_fit(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d::Zero());
  EXPECT_EQ(ehw_variance(fit).matrix.norm(), 0.0);
}

TEST(EhwTest, SingleDyadHandArithmetic) {
  const OlsFit fit = hand_fit(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(ehw_variance(fit).matrix(0, 0), 4.0);
}

TEST(DyadicTest, PathGraphDoubleSum) {
  // Path 0-1-2-3: dyads (0,1) ~ (1,2) ~ (2,3).
  const DyadNetwork net{DyadIndex(NodeGraph(4, {{0, 1}, {1, 2}, {2, 3}}))};
  const Eigen::Vector3d x(1.0, 2.0, -1.0), e(0.5, -1.0, 2.0);
  const OlsFit fit = hand_fit(x, e);
  const Eigen::Vector3d u = x.cwiseProduct(e);  // 0.5, -2, -2
  // Self terms plus both orientations of the two adjacent pairs.
  const double meat = u.squaredNorm() + 2 * u(0) * u(1) + 2 * u(1) * u(2);
  const double bread = 1.0 / x.squaredNorm();
  EXPECT_NEAR(dyadic_robust_variance(fit, net).matrix(0, 0), bread * meat * bread, 1e-15);
  // Adding the distance-2 pair gives the rectangular b = 2 estimate.
  const double meat2 = meat + 2 * u(0) * u(2);
  EXPECT_NEAR(network_hac_variance(fit, net, Kernel{}, 2.0).matrix(0, 0),
              bread * meat2 * bread, 1e-15);
}

TEST(DyadicTest, IsolatedDyadsEqualEhw) {
  const DyadNetwork net{DyadIndex(NodeGraph(6, {{0, 1}, {2, 3}, {4, 5}}))};
  const OlsFit fit = hand_fit(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(0.3, -0.2, 0.9));
  EXPECT_EQ(dyadic_robust_variance(fit, net).matrix, ehw_variance(fit).matrix);
}

TEST(DyadicTest, MisalignedRowsThrow) {
  const DyadNetwork net{DyadIndex(NodeGraph(4, {{0, 1}, {1, 2}, {2, 3}}))};
  const OlsFit fit = hand_fit(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 1));
  EXPECT_THROW(dyadic_robust_variance(fit, net), ValidationError);
}

TEST(NetworkHacTest, CollapseIdentities) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance in = random_instance(seed, 25, 120);
    const MatrixXd ehw = ehw_variance(in.fit).matrix;
    const MatrixXd dyadic = dyadic_robust_variance(in.fit, in.net).matrix;
    EXPECT_LE(testing::rel_frobenius(network_hac_variance(in.fit, in.net, Kernel{}, 0.5).matrix, ehw), 1e-12);
    EXPECT_LE(testing::rel_frobenius(network_hac_variance(in.fit, in.net, Kernel{}, 1.0).matrix, dyadic), 1e-12);
    EXPECT_LE(testing::rel_frobenius(network_hac_variance(in.fit, in.net, Kernel{}, 1.9).matrix, dyadic), 1e-12);
  }
}

TEST(NetworkHacTest, MatchesBruteForceDoubleSum) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance in = random_instance(seed + 1000, 14, 30);
    for (const Kernel k : {Kernel(KernelKind::kRectangular), Kernel(KernelKind::kBartlett)}) {
      for (double b : {0.7, 1.0, 2.0, 3.0, 4.5}) {
        const MatrixXd got = network_hac_variance(in.fit, in.net, k, b).matrix;
        const MatrixXd want = brute_force(in.fit, in.net, k, b);
        EXPECT_LE(testing::rel_frobenius(got, want, ehw_variance(in.fit).matrix.norm()), 1e-10)
            << "seed " << seed << " kernel " << k.name() << " b " << b;
      }
    }
  }
}

TEST(NetworkHacTest, ThreadCountDoesNotChangeBits) {
  const Instance in = random_instance(5, 60, 400);
  const MatrixXd one = network_hac_variance(in.fit, in.net, Kernel{}, 3.0, {1}).matrix;
  for (unsigned t : {2u, 3u, 8u}) {
    EXPECT_EQ(network_hac_variance(in.fit, in.net, Kernel{}, 3.0, {t}).matrix, one);
  }
}

TEST(NetworkHacTest, Symmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = random_instance(seed + 50, 20, 60);
    for (const MatrixXd& v : {ehw_variance(in.fit).matrix,
                              dyadic_robust_variance(in.fit, in.net).matrix,
                              network_hac_variance(in.fit, in.net, Kernel{}, 2.0).matrix}) {
      EXPECT_LE((v - v.transpose()).norm(), 1e-12 * v.norm());
    }
    EXPECT_GE(min_eigenvalue(ehw_variance(in.fit).matrix), -1e-12);
  }
}

TEST(NetworkHacTest, InvalidBandwidth) {
  const Instance in = random_instance(1, 10, 20);
  EXPECT_THROW(network_hac_variance(in.fit, in.net, Kernel{}, std::nan("")), ValidationError);
  EXPECT_THROW(network_hac_variance(in.fit, in.net, Kernel{}, INFINITY), ValidationError);
  EXPECT_THROW(network_hac_variance(in.fit, in.net, Kernel{}, 0.0), ValidationError);
}

TEST(NetworkHacTest, MonotoneUnderPositiveScores) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = Rng::substream(seed, 3);
    const NodeGraph g = testing::random_small_graph(rng, 20, 60);
    const DyadNetwork net{DyadIndex(g)};
    Eigen::VectorXd x(net.size()), e(net.size());
    for (std::size_t m = 0; m < net.size(); ++m) {
      x(static_cast<Index>(m)) = 0.1 + rng.uniform();
      e(static_cast<Index>(m)) = 0.1 + rng.uniform();
    }
    const OlsFit fit = hand_fit(x, e);
    const double ehw = ehw_variance(fit).matrix(0, 0);
    const double dyadic = dyadic_robust_variance(fit, net).matrix(0, 0);
    const double network = network_hac_variance(fit, net, Kernel{}, 2.0).matrix(0, 0);
    EXPECT_LE(ehw, dyadic);
    EXPECT_LE(dyadic, network);
  }
}

TEST(NetworkHacTest, RelabelingInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = Rng::substream(seed, 99);
    const NodeGraph g = testing::random_small_graph(rng, 18, 50);
    const DyadNetwork net{DyadIndex(g)};
    const std::size_t m = net.size();
    const RegressionData d = testing::random_regression(rng, m, std::min<std::size_t>(2, m));

    // Relabel nodes with a random permutation; dyad ids change accordingly.
    std::vector<NodeId> perm(g.n_nodes());
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    std::vector<NodePair> edges;
    for (const auto& e : g.edges()) edges.push_back({perm[e.i], perm[e.j]});
    const DyadNetwork net2{DyadIndex(NodeGraph(g.n_nodes(), edges))};
    RegressionData d2 = d;
    for (std::size_t r = 0; r < m; ++r) {
      const NodePair p = net.index().dyad(d.dyad_ids[r]);
      d2.dyad_ids[r] = *net2.index().find(perm[p.i], perm[p.j]);
    }
    const OlsFit f1 = ols_fit(d), f2 = ols_fit(d2);
    const double floor = ehw_variance(f1).matrix.norm();
    EXPECT_LE(testing::rel_frobenius(dyadic_robust_variance(f2, net2).matrix,
                                     dyadic_robust_variance(f1, net).matrix, floor), 1e-12);
    EXPECT_LE(testing::rel_frobenius(network_hac_variance(f2, net2, Kernel{}, 3.0).matrix,
                                     network_hac_variance(f1, net, Kernel{}, 3.0).matrix, floor),
              1e-12);
  }
}

TEST(BandwidthTest, Rule) {
  EXPECT_EQ(default_bandwidth(1, 0.0), 0.0);
  EXPECT_NEAR(default_bandwidth(100, 4.0), 6.643856189774724, 1e-12);
  EXPECT_DOUBLE_EQ(default_bandwidth(100, 0.5), 2 * std::log(100.0) / std::log(1.05));
  EXPECT_DOUBLE_EQ(default_bandwidth(100, 1.05), default_bandwidth(100, 0.2));
  EXPECT_THROW(default_bandwidth(0, 2.0), ValidationError);
  // Triangle: M = 3, every dyad has two neighbours.
  const DyadNetwork k3{DyadIndex(NodeGraph(3, {{0, 1}, {1, 2}, {0, 2}}))};
  EXPECT_DOUBLE_EQ(default_bandwidth(k3), 2 * std::log(3.0) / std::log(2.0));
}

TEST(RepairTest, PsdUnchangedAtZeroEpsilon) {
  VarianceEstimate v;
  v.matrix = (MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const VarianceEstimate r = repair_psd(v, 0.0);
  EXPECT_LT((r.matrix - v.matrix).norm(), 1e-10);
  EXPECT_TRUE(r.psd_repaired);
}

TEST(RepairTest, DiagonalCase) {
  VarianceEstimate v;
  v.matrix = Eigen::Vector2d(-0.001, 1.0).asDiagonal();
  const VarianceEstimate r = repair_psd(v, 0.005);
  EXPECT_NEAR(r.matrix(0, 0), 0.004, 1e-15);
  EXPECT_NEAR(r.matrix(1, 1), 1.005, 1e-15);
  EXPECT_NEAR(r.matrix(0, 1), 0.0, 1e-15);
  EXPECT_EQ(r.psd_epsilon, 0.005);
}

TEST(RepairTest, ShiftsEveryEigenvalue) {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q(i, j) = rng.normal();
    q = Eigen::HouseholderQR<Eigen::Matrix3d>(q).householderQ();
    const Eigen::Vector3d lambda(-0.02, 0.3, 1.7);
    VarianceEstimate v;
    v.matrix = q * lambda.asDiagonal() * q.transpose();
    v.matrix = 0.5 * (v.matrix + v.matrix.transpose()).eval();
    const VarianceEstimate r = repair_psd(v, 0.005);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r.matrix);
    EXPECT_NEAR(eig.eigenvalues()(0), -0.015, 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(1), 0.305, 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(2), 1.705, 1e-12);
  }
}

TEST(RepairTest, RejectsAsymmetric) {
  VarianceEstimate v;
  v.matrix = (MatrixXd(2, 2) << 1.0, 0.5, 0.4, 1.0).finished();
  EXPECT_THROW(repair_psd(v, 0.005), ValidationError);
}

TEST(ConfidenceIntervalTest, NormalQuantile) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_THROW(normal_quantile(1.0), ValidationError);
}

TEST(ConfidenceIntervalTest, HalfWidth) {
  OlsFit fit = hand_fit(Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0));
  fit.beta(0) = 0.7;
  VarianceEstimate v;
  v.matrix = MatrixXd::Constant(1, 1, 0.04);
  const ConfidenceInterval ci = confidence_interval(fit, v, 0, 0.95);
  EXPECT_NEAR(ci.hi - 0.7, 1.959964 * 0.2, 1e-6);
  EXPECT_NEAR(0.7 - ci.lo, 1.959964 * 0.2, 1e-6);
  EXPECT_TRUE(ci.contains(0.9));
  EXPECT_FALSE(ci.contains(1.2));

  v.matrix(0, 0) = 0.0;
  const ConfidenceInterval point = confidence_interval(fit, v, 0, 0.95);
  EXPECT_EQ(point.lo, 0.7);
  EXPECT_EQ(point.hi, 0.7);

  v.matrix(0, 0) = -1e-6;
  try {
    confidence_interval(fit, v, 0, 0.95);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("repair_psd"), std::string::npos) << e.what();
  }
  EXPECT_THROW(confidence_interval(fit, v, 3, 0.95), ValidationError);
}

}  // namespace
}  // namespace netdyad
