#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "likenet/analysis.hpp"
#include "oracle.hpp"

using namespace likenet;

namespace {

std::vector<SystemRecord> small_ensemble(std::size_t samples, std::uint64_t seed = 5) {
  EnsembleConfig cfg;
  cfg.sample_count = samples;
  cfg.master_seed = seed;
  return collect_ensemble(cfg);
}

}  // namespace

TEST(ExponentialReference, Percentiles) {
  EXPECT_NEAR(exp_cdf(1.0, 1.0), 0.6321205588285577, 1e-15);
  EXPECT_NEAR(exp_quantile(0.953, 1.0), 3.0576077, 1e-6);
  const auto edges = exp_percentile_edges(2.0, 50);
  ASSERT_EQ(edges.size(), 51u);
  EXPECT_EQ(edges.front(), 0.0);
  EXPECT_TRUE(std::isinf(edges.back()));
  EXPECT_NEAR(exp_cdf(edges[25], 2.0), 0.5, 1e-12);
}

TEST(Representation, SelfComparisonIsUnity) {
  const auto recs = small_ensemble(40);
  const auto rates = rate_representation(recs, recs);
  for (const auto& v : rates.series.bin_values)
    if (v) {
      EXPECT_DOUBLE_EQ(*v, 1.0);
    }
  const auto degrees = degree_representation(recs, recs);
  ASSERT_EQ(degrees.series.bins(), 10u);
  for (std::size_t d = 0; d < 10; ++d) {
    if (degrees.population_counts[d] == 0) EXPECT_FALSE(degrees.series.bin_values[d]);
    else EXPECT_DOUBLE_EQ(*degrees.series.bin_values[d], 1.0);
  }
  // BA(10, 2) never produces degrees 0 or 1.
  EXPECT_FALSE(degrees.series.bin_values[0]);
  EXPECT_FALSE(degrees.series.bin_values[1]);
  EXPECT_DOUBLE_EQ(*rates.region_ratio(0, 31), 1.0);
}

TEST(Representation, DetectsShiftTowardHighRates) {
  auto recs = small_ensemble(30);
  auto boosted = recs;
  for (auto& r : boosted)
    for (auto& d : r.outgoing_rates) d.rate *= 3.0;
  const auto rep = rate_representation(boosted, recs);
  EXPECT_LT(*rep.region_ratio(0, 31), 1.0);
  EXPECT_GE(*rep.argmax(), 31u);
}

TEST(Representation, EmptyInputsRejected) {
  const auto recs = small_ensemble(5);
  EXPECT_THROW(rate_representation({}, recs), std::invalid_argument);
  EXPECT_THROW(degree_representation(recs, {}), std::invalid_argument);
}

TEST(Spearman, BasicsAndTies) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_EQ(spearman({1, 2, 3}, {5, 5, 5}), 0.0);
  EXPECT_EQ(average_ranks({3.0, 1.0, 3.0, 2.0}), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(200), y(200), ty(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = z(gen);
      y[i] = 0.3 * x[i] + z(gen);
      ty[i] = std::exp(2.0 * y[i]) + 7.0;
    }
    EXPECT_NEAR(spearman(y, x), spearman(ty, x), 1e-12);
  }
}

TEST(StabilityProfile, ConstantStabilityIsFlat) {
  auto recs = small_ensemble(60);
  for (auto& r : recs) r.stability = 0.4;
  const auto prof = stability_vs_metric(recs, GraphMetric::MeanPathLength);
  EXPECT_EQ(prof.spearman, 0.0);
  for (const auto& v : prof.series.bin_values) EXPECT_DOUBLE_EQ(*v, 0.4);
  EXPECT_EQ(prof.series.bin_edges.size(), prof.series.bins() + 1);
  std::size_t total = 0;
  for (auto c : prof.series.bin_counts) total += c;
  EXPECT_EQ(total, 60u);
}

TEST(StabilityProfile, LevelsAreDistinctMetricValues) {
  const auto recs = small_ensemble(80);
  const auto prof = stability_vs_metric(recs, GraphMetric::MeanLocalClustering);
  for (std::size_t b = 1; b < prof.levels.size(); ++b) EXPECT_GT(prof.levels[b], prof.levels[b - 1]);
  for (std::size_t b = 0; b < prof.levels.size(); ++b) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : recs) {
      if (std::abs(r.mean_local_clustering - prof.levels[b]) <= 1e-9) {
        sum += r.stability;
        ++count;
      }
    }
    EXPECT_EQ(count, prof.series.bin_counts[b]);
    EXPECT_NEAR(*prof.series.bin_values[b], sum / static_cast<double>(count), 1e-15);
  }
}

TEST(LogisticFit, RecoversNoiseFreeCoefficients) {
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> sd(0.3, 2.5), pl(1.4, 2.6), cl(0.0, 0.7);
  const double truth[] = {1.2, 0.35, -0.9, -0.4};
  Eigen::MatrixXd x(400, 3);
  Eigen::VectorXd y(400);
  for (int i = 0; i < 400; ++i) {
    x(i, 0) = sd(gen);
    x(i, 1) = pl(gen);
    x(i, 2) = cl(gen);
    y[i] = logistic(truth[0] + truth[1] * x(i, 0) + truth[2] * x(i, 1) + truth[3] * x(i, 2));
  }
  const auto fit = logistic_fit(x, y);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.intercept, truth[0], 1e-6);
  EXPECT_NEAR(fit.coef_preferential, truth[1], 1e-6);
  EXPECT_NEAR(fit.coef_path_length, truth[2], 1e-6);
  EXPECT_NEAR(fit.coef_clustering, truth[3], 1e-6);
  EXPECT_LT(fit.residual_norm, 1e-8);
  for (std::size_t i = 1; i < fit.accepted_residual_norms.size(); ++i) {
    EXPECT_LE(fit.accepted_residual_norms[i], fit.accepted_residual_norms[i - 1]);
  }
}

TEST(LogisticFit, AcceptedStepsNeverIncreaseResidualOnEnsembleData) {
  const auto fit = logistic_fit(small_ensemble(300));
  EXPECT_GE(fit.residual_norm, 0.0);
  for (std::size_t i = 1; i < fit.accepted_residual_norms.size(); ++i) {
    EXPECT_LE(fit.accepted_residual_norms[i], fit.accepted_residual_norms[i - 1]);
  }
}

TEST(LogisticFit, Errors) {
  auto recs = small_ensemble(60);
  EXPECT_THROW(logistic_fit(std::vector<SystemRecord>(recs.begin(), recs.begin() + 30)),
               std::invalid_argument);
  for (auto& r : recs) r.mean_local_clustering = 0.25;
  EXPECT_THROW(logistic_fit(recs), RankDeficient);
}

TEST(Reciprocity, SymmetricRatesLieOnDiagonal) {
  std::mt19937_64 gen(3);
  const auto g = generate_ba(10, 2, 3);
  auto r = oracle::random_rates(g, gen, 0.0, 3.0);
  for (const auto& e : g.edges()) r(e.second, e.first) = r(e.first, e.second);
  const auto edges = reciprocity_bins(1.0);
  const auto curve = reciprocity_curve(g, r, edges);
  // With R symmetric, each bin's mean returned rate is its mean outgoing rate.
  for (std::size_t b = 0; b < curve.bins(); ++b) {
    if (!curve.bin_values[b]) continue;
    EXPECT_GE(*curve.bin_values[b], edges[b]);
    EXPECT_LE(*curve.bin_values[b], edges[b + 1]);
  }
}

TEST(Reciprocity, OneWayRatesGiveZeroCurve) {
  const auto g = generate_star(6);
  RateMatrix r(6);
  for (NodeId leaf = 1; leaf < 6; ++leaf) r(leaf, 0) = static_cast<double>(leaf);  // hub likes leaves
  const auto curve = reciprocity_curve(g, r, {0.5, 1.5, 3.5, 10.0});  // excludes zero outgoing rates
  std::size_t counted = 0;
  for (std::size_t b = 0; b < curve.bins(); ++b) {
    counted += curve.bin_counts[b];
    if (curve.bin_values[b]) {
      EXPECT_EQ(*curve.bin_values[b], 0.0);
    }
  }
  EXPECT_EQ(counted, 5u);
}

TEST(Coalition, OutlyingPairPrefersMinimumDegreeEdge) {
  const Graph g(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {3, 4}, {1, 2}, {2, 3}});
  // degrees: 0:4, 1:2, 2:3, 3:3, 4:2 -> no min-degree edge; smallest sum is (1,2) = 5 vs (3,4) = 5.
  EXPECT_EQ(outlying_pair(g), (std::pair<NodeId, NodeId>{1, 2}));
  const Graph h(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(outlying_pair(h), (std::pair<NodeId, NodeId>{0, 1}));
}

TEST(Coalition, BaselinePointReproducesCentralities) {
  const auto g = generate_complete(4);
  const auto r = uniform_rates(g, 1.0);
  const auto base = likedness_centrality(g, r);
  const auto sweep = coalition_sweep(g, r, 0, 1, {1.0});
  EXPECT_NEAR(sweep[0].member_a, base.values[0], 1e-12);
  EXPECT_NEAR(sweep[0].member_b, base.values[1], 1e-12);
  EXPECT_NEAR(sweep[0].others_mean, (base.values[2] + base.values[3]) / 2.0, 1e-12);
}

TEST(Coalition, ZeroJointRateIsLocal) {
  // Path 0-1-2-3 with coalition (0, 1) at rho = 0: node 0 is then liked by
  // nobody, so its centrality vanishes whatever the other rates are.
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
  std::mt19937_64 gen(9);
  const auto r = oracle::random_rates(g, gen);
  const auto sweep = coalition_sweep(g, r, 0, 1, {0.0});
  EXPECT_NEAR(sweep[0].member_a, 0.0, 1e-9);
}

TEST(Coalition, Errors) {
  const auto g = generate_path(4);
  const auto r = uniform_rates(g, 1.0);
  EXPECT_THROW(coalition_sweep(g, r, 1, 1, {1.0}), std::invalid_argument);
  EXPECT_THROW(coalition_sweep(g, r, 0, 2, {1.0}), std::invalid_argument);
  EXPECT_THROW(coalition_sweep(g, r, 0, 1, {-1.0}), std::invalid_argument);
}

TEST(StarComparison, UniformStarBranchesAreEqual) {
  const auto g = generate_star(10);
  const auto c = likedness_centrality(g, uniform_rates(g, 2.0));
  for (NodeId i = 2; i < 10; ++i) EXPECT_NEAR(c.values[i], c.values[1], 1e-12);
}

TEST(StarComparison, SingleSampleIsValidButWarned) {
  const auto recs = small_ensemble(200);
  EnsembleConfig cfg;
  const auto cmp = star_comparison(recs, 1, cfg);
  EXPECT_EQ(cmp.star_count, 1u);
  EXPECT_EQ(cmp.top_star_count, 1u);
  EXPECT_GT(cmp.ba_hub_count, 0u);
  EXPECT_FALSE(cmp.warnings.empty());
  EXPECT_TRUE(std::isfinite(cmp.branch_hub_ratio));
}

TEST(StarComparison, EmptyHubSubsetIsAnError) {
  auto recs = small_ensemble(20);
  for (auto& r : recs) r.degree_histogram[9] = 0;
  EXPECT_THROW(star_comparison(recs, 5, EnsembleConfig{}), std::runtime_error);
}

TEST(Report, SeriesCsvFormat) {
  BinnedSeries s;
  s.bin_edges = {0.0, 1.0, 2.5};
  s.bin_values = {0.5, std::nullopt};
  s.bin_counts = {3, 0};
  std::ostringstream out;
  write_series_csv(out, s);
  EXPECT_EQ(out.str(), "bin_low,bin_high,value,count\n0,1,0.5,3\n1,2.5,,0\n");
}
