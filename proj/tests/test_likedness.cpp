#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "likenet/likedness.hpp"
#include "oracle.hpp"

using namespace likenet;

namespace {

RateMatrix two_node(double a, double b) {
  RateMatrix r(2);
  r(0, 1) = a;  // node 1 likes node 0 at rate a
  r(1, 0) = b;
  return r;
}

double max_residual(const Graph& g, const RateMatrix& r, const std::vector<double>& raw) {
  double worst = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (g.degree(i) == 0) continue;
    double num = 0.0, den = 0.0;
    for (NodeId j : g.neighbors(i)) {
      num += r(i, j) * raw[j];
      den += raw[j];
    }
    worst = std::max(worst, std::abs(raw[i] - num / den));
  }
  return worst;
}

}  // namespace

TEST(Likedness, TwoNodeFixedPointIsForced) {
  const Graph g(2, {{0, 1}});
  const auto c = likedness_centrality(g, two_node(3.0, 1.0));
  ASSERT_TRUE(c.converged);
  EXPECT_NEAR(c.values[0], 0.75, 1e-10);
  EXPECT_NEAR(c.values[1], 0.25, 1e-10);
  EXPECT_NEAR(c.raw[0], 3.0, 1e-9);
  EXPECT_NEAR(c.raw[1], 1.0, 1e-9);
}

TEST(Likedness, SymmetricTriangleIsUniform) {
  const auto g = generate_complete(3);
  const auto c = likedness_centrality(g, uniform_rates(g, 2.5));
  for (double v : c.values) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(Likedness, IsolatedNodesStayZero) {
  const Graph g(4, {{0, 1}, {1, 2}});
  RateMatrix r = uniform_rates(g, 1.0);
  r(0, 1) = 2.0;
  const auto c = likedness_centrality(g, r);
  EXPECT_EQ(c.values[3], 0.0);
  EXPECT_EQ(c.raw[3], 0.0);
  EXPECT_NEAR(std::accumulate(c.values.begin(), c.values.end(), 0.0), 1.0, 1e-12);
}

TEST(Likedness, NobodyLikedGoesToZero) {
  // Path 0-1-2 where nobody likes node 1: its centrality collapses to 0, and
  // then 0 and 2 see only a zero-prestige neighbor.
  const Graph g(3, {{0, 1}, {1, 2}});
  RateMatrix r(3);
  r(0, 1) = 1.0;
  r(2, 1) = 2.0;
  const auto c = likedness_centrality(g, r);
  EXPECT_NEAR(c.raw[1], 0.0, 1e-9);
}

TEST(Likedness, Errors) {
  const Graph g(2, {{0, 1}});
  EXPECT_THROW(likedness_centrality(g, RateMatrix(3)), std::invalid_argument);
  EXPECT_THROW(likedness_centrality(g, RateMatrix(2)), DegenerateSystem);
  EXPECT_THROW(likedness_centrality(Graph(2, {}), RateMatrix(2)), std::invalid_argument);
  RateMatrix off(3);
  off(0, 2) = 1.0;
  EXPECT_THROW(likedness_centrality(Graph(3, {{0, 1}}), off), std::invalid_argument);
  SolverOptions bad;
  bad.relaxation = 0.0;
  EXPECT_THROW(likedness_centrality(g, two_node(1, 1), bad), std::invalid_argument);
}

TEST(Likedness, IterationCapReturnsBestIterateFlagged) {
  const auto g = generate_ba(10, 2, 4);
  std::mt19937_64 gen(4);
  const auto r = oracle::random_rates(g, gen);
  SolverOptions opts;
  opts.max_iterations = 3;
  const auto c = likedness_centrality(g, r, opts);
  EXPECT_FALSE(c.converged);
  EXPECT_EQ(c.iterations, 3u);
  EXPECT_NEAR(std::accumulate(c.values.begin(), c.values.end(), 0.0), 1.0, 1e-12);
}

TEST(Likedness, MatchesUndampedLongDoubleOracle) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_connected(4, gen);
    const auto r = oracle::random_rates(g, gen);
    const auto c = likedness_centrality(g, r);
    ASSERT_TRUE(c.converged);
    const auto ref = oracle::likedness(g, r);
    for (NodeId i = 0; i < 4; ++i) EXPECT_NEAR(c.values[i], ref[i], 1e-8);
  }
}

TEST(Likedness, ResidualWithinToleranceAtConvergence) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_connected(3 + trial % 8, gen);
    const auto r = oracle::random_rates(g, gen, 0.0, 4.0);
    const auto c = likedness_centrality(g, r);
    ASSERT_TRUE(c.converged);
    EXPECT_LE(max_residual(g, r, c.raw), 1e-10);
  }
}

TEST(Likedness, InitialScaleDoesNotMatter) {
  std::mt19937_64 gen(21);
  const auto g = oracle::random_connected(7, gen);
  const auto r = oracle::random_rates(g, gen);
  const auto base = likedness_centrality(g, r);
  for (double scale : {1e-3, 1.0, 250.0}) {
    std::vector<double> init(7, scale);
    const auto c = likedness_centrality(g, r, {}, init);
    for (NodeId i = 0; i < 7; ++i) EXPECT_NEAR(c.values[i], base.values[i], 1e-9);
  }
}

TEST(Likedness, RateUnitCovariance) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_connected(6, gen);
    const auto r = oracle::random_rates(g, gen);
    const double c = 0.1 + 5.0 * std::uniform_real_distribution<double>(0, 1)(gen);
    const auto base = likedness_centrality(g, r);
    const auto scaled = likedness_centrality(g, r.scaled(c));
    for (NodeId i = 0; i < 6; ++i) {
      EXPECT_NEAR(scaled.raw[i], c * base.raw[i], 1e-8 * c);
      EXPECT_NEAR(scaled.values[i], base.values[i], 1e-9);
    }
  }
}

TEST(Likedness, RelabelingEquivariance) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_connected(7, gen);
    const auto r = oracle::random_rates(g, gen);
    std::vector<NodeId> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    const auto base = likedness_centrality(g, r);
    const auto moved = likedness_centrality(g.relabeled(perm), r.relabeled(perm));
    for (NodeId i = 0; i < 7; ++i) EXPECT_NEAR(moved.values[perm[i]], base.values[i], 1e-9);
  }
}

TEST(Likedness, VertexTransitiveUniformRatesGiveUniformOutput) {
  for (std::size_t n : {4u, 7u, 10u}) {
    for (const auto& g : {generate_cycle(n), generate_complete(n)}) {
      const auto c = likedness_centrality(g, uniform_rates(g, 0.7));
      for (double v : c.values) EXPECT_NEAR(v, 1.0 / static_cast<double>(n), 1e-12);
    }
  }
}

TEST(Eigenvector, SymmetricTriangle) {
  const auto g = generate_complete(3);
  const auto c = eigenvector_centrality(g, uniform_rates(g, 4.0));
  for (double v : c.values) EXPECT_NEAR(v, 1.0 / 3.0, 1e-9);
}

TEST(Eigenvector, TwoNodeDominantVector) {
  const Graph g(2, {{0, 1}});
  // [[0,4],[1,0]] has dominant eigenvector (2, 1).
  const auto c = eigenvector_centrality(g, two_node(4.0, 1.0));
  EXPECT_NEAR(c.values[0], 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(c.values[1], 1.0 / 3.0, 1e-9);
  // [[0,3],[1,0]] -> (sqrt 3, 1).
  const auto d = eigenvector_centrality(g, two_node(3.0, 1.0));
  EXPECT_NEAR(d.values[0], std::sqrt(3.0) / (1.0 + std::sqrt(3.0)), 1e-9);
}

TEST(Eigenvector, ScaleInvariant) {
  std::mt19937_64 gen(31);
  const auto g = oracle::random_connected(6, gen);
  const auto r = oracle::random_rates(g, gen);
  const auto a = eigenvector_centrality(g, r);
  const auto b = eigenvector_centrality(g, r.scaled(17.0));
  for (NodeId i = 0; i < 6; ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
}

TEST(Eigenvector, NonConvergenceIsAnError) {
  std::mt19937_64 gen(32);
  const auto g = oracle::random_connected(6, gen);
  SolverOptions opts;
  opts.max_iterations = 2;
  EXPECT_THROW(eigenvector_centrality(g, oracle::random_rates(g, gen), opts), std::runtime_error);
}
