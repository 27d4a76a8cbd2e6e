#include "sbmcv/analysis.hpp"
#include "sbmcv/criteria.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace sbmcv;

namespace {

ReplicateRecord record(int k_true, int k_hat, std::string status = "ok") {
  ReplicateRecord r;
  r.cell = CellId{30, k_true, SizeScheme::Equal, 0.1, 4};
  r.method = "latin:10";
  r.k_hat = k_hat;
  r.status = std::move(status);
  return r;
}

std::vector<ReplicateRecord> random_records(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<ReplicateRecord> out;
  for (int i = 0; i < count; ++i)
    out.push_back(record(1 + static_cast<int>(uniform_below(rng, 5)), 1 + static_cast<int>(uniform_below(rng, 14))));
  return out;
}

}  // namespace

TEST(Accuracy, AllCorrectClipsAtOne) {
  const std::vector<ReplicateRecord> rs(10, record(2, 2));
  const AccuracySummary s = accuracy(rs);
  EXPECT_EQ(s.accuracy, 1.0);
  EXPECT_EQ(s.ci_high, 1.0);
  EXPECT_EQ(s.ci_low, 1.0);
  EXPECT_EQ(s.count, 10u);
  EXPECT_EQ(s.method, "latin:10");
}

TEST(Accuracy, FortyTwoOfHundred) {
  const AccuracySummary s = accuracy_from_counts(42, 100);
  const double half = 1.96 * std::sqrt(0.42 * 0.58 / 100);
  EXPECT_NEAR(half, 1.96 * 0.04936, 1e-4);
  EXPECT_DOUBLE_EQ(s.accuracy, 0.42);
  EXPECT_NEAR(s.ci_low, 0.42 - half, 1e-12);
  EXPECT_NEAR(s.ci_high, 0.42 + half, 1e-12);
}

TEST(Accuracy, ClopperPearson) {
  const AccuracySummary s = accuracy_from_counts(42, 100, IntervalKind::ClopperPearson);
  EXPECT_NEAR(s.ci_low, 0.3219855, 1e-6);
  EXPECT_NEAR(s.ci_high, 0.5228808, 1e-6);
  const AccuracySummary zero = accuracy_from_counts(0, 10, IntervalKind::ClopperPearson);
  EXPECT_EQ(zero.ci_low, 0.0);
  EXPECT_NEAR(zero.ci_high, 0.3084971, 1e-6);
}

TEST(Accuracy, IntervalContainsEstimate) {
  for (std::size_t total : {1u, 7u, 100u})
    for (std::size_t hits = 0; hits <= total; hits += std::max<std::size_t>(1, total / 7))
      for (IntervalKind kind : {IntervalKind::Normal, IntervalKind::ClopperPearson}) {
        const AccuracySummary s = accuracy_from_counts(hits, total, kind);
        EXPECT_LE(s.ci_low, s.accuracy);
        EXPECT_LE(s.accuracy, s.ci_high);
        EXPECT_GE(s.ci_low, 0.0);
        EXPECT_LE(s.ci_high, 1.0);
      }
}

TEST(Accuracy, EmptyRejectedAndFailuresAreMisses) {
  EXPECT_THROW(accuracy(std::span<const ReplicateRecord>{}), std::invalid_argument);
  const std::vector<ReplicateRecord> rs{record(2, 2), record(2, 2, "failed: boom")};
  EXPECT_DOUBLE_EQ(accuracy(rs).accuracy, 0.5);
}

TEST(Accuracy, OrderDoesNotMatter) {
  auto rs = random_records(1, 200);
  const AccuracySummary a = accuracy(rs);
  std::reverse(rs.begin(), rs.end());
  const AccuracySummary b = accuracy(rs);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.ci_low, b.ci_low);
}

TEST(Confusion, SingleRecord) {
  const std::vector<ReplicateRecord> rs{record(2, 3)};
  const ConfusionTable t = confusion(rs, 11);
  ASSERT_EQ(t.frequencies.rows(), 12);
  ASSERT_EQ(t.frequencies.cols(), 2);
  EXPECT_EQ(t.frequencies(2, 1), 1.0);
  EXPECT_EQ(t.frequencies.col(1).sum(), 1.0);
  EXPECT_EQ(t.totals[0], 0u);
}

TEST(Confusion, OverflowRow) {
  const std::vector<ReplicateRecord> rs{record(1, 12), record(1, 30), record(1, 11)};
  const ConfusionTable t = confusion(rs, 11);
  EXPECT_NEAR(t.frequencies(11, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.frequencies(10, 0), 1.0 / 3.0, 1e-15);
}

TEST(Confusion, ColumnsSumToOneAndDiagonalIsAccuracy) {
  const auto rs = random_records(2, 500);
  const ConfusionTable t = confusion(rs, 11);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(t.frequencies.col(k - 1).sum(), 1.0, 1e-12);
    std::vector<ReplicateRecord> column;
    for (const auto& r : rs)
      if (r.cell.blocks == k) column.push_back(r);
    EXPECT_NEAR(t.frequencies(k - 1, k - 1), accuracy(column).accuracy, 1e-12);
  }
}

TEST(MseVsTruth, ExactFitIsZero) {
  const Membership labels = memberships_from_sizes(equal_block_sizes(10, 2));
  const BlockMatrix b = planted_partition(2, 0.1, 4);
  FittedSbm fit;
  fit.blocks = 2;
  fit.labels = labels;
  fit.block_probs = b;
  EXPECT_EQ(mse_vs_truth(tie_probabilities(b, labels), fit), 0.0);
}

TEST(MseVsTruth, ConstantFitOnTwoBlockTruth) {
  const Membership labels = memberships_from_sizes(equal_block_sizes(12, 2));
  const TieProbabilities p = tie_probabilities(planted_partition(2, 0.1, 4), labels);
  Rng rng(3);
  const Adjacency y = sample_network(p, rng);
  const FittedSbm fit = fit_sbm(y, 1, TrainingMask::full(12), rng);
  const double c = fit.block_probs(0, 0);
  double sum = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (i != j) sum += (p(i, j) - c) * (p(i, j) - c);
  EXPECT_NEAR(mse_vs_truth(p, fit), sum / 132, 1e-14);
}

TEST(BernoulliNoise, ConstantTruth) {
  const TieProbabilities p = tie_probabilities(planted_partition(1, 0.1, 2), Membership(5, 0));
  EXPECT_NEAR(bernoulli_noise(p), 0.16, 1e-15);
}

TEST(DecomposeVariance, FoldFreeEstimatorHasNoFoldShare) {
  Matrix grid(3, 4);
  grid.row(0).setConstant(1.0);
  grid.row(1).setConstant(2.0);
  grid.row(2).setConstant(4.0);
  const VarianceDecomposition d = decompose_variance(grid);
  EXPECT_EQ(d.fold_share, 0.0);
  EXPECT_DOUBLE_EQ(d.network_share, 1.0);
  EXPECT_NEAR(d.total_variance, 14.0 / 9.0, 1e-14);
}

TEST(DecomposeVariance, HandExampleAndSharesSumToOne) {
  const Matrix grid{{1.0, 3.0}, {5.0, 7.0}};
  const VarianceDecomposition d = decompose_variance(grid);
  EXPECT_DOUBLE_EQ(d.total_variance, 5.0);  // within 1, between 4
  EXPECT_DOUBLE_EQ(d.fold_share, 0.2);
  EXPECT_DOUBLE_EQ(d.total_sd, std::sqrt(5.0));

  Rng rng(4);
  Matrix random(6, 5);
  for (Eigen::Index i = 0; i < random.size(); ++i) random(i) = uniform01(rng);
  const VarianceDecomposition r = decompose_variance(random);
  EXPECT_NEAR(r.fold_share + r.network_share, 1.0, 1e-10);
  EXPECT_GE(r.fold_share, 0.0);
  EXPECT_LE(r.fold_share, 1.0);
  // Law of total variance: equals the population variance of all entries.
  const double mean = random.mean();
  EXPECT_NEAR(r.total_variance, (random.array() - mean).square().mean(), 1e-14);
}

TEST(DecomposeVariance, DegenerateGrid) {
  const VarianceDecomposition d = decompose_variance(Matrix::Constant(3, 3, 0.2));
  EXPECT_EQ(d.total_variance, 0.0);
  EXPECT_EQ(d.fold_share, 0.0);
  EXPECT_EQ(d.network_share, 0.0);
  EXPECT_THROW(decompose_variance(Matrix(0, 0)), std::invalid_argument);
}

TEST(BiasVariance, ExactEstimator) {
  const std::vector<double> e(5, 0.3);
  const BiasVariance bv = bias_variance(e, 0.3);
  EXPECT_EQ(bv.bias_squared, 0.0);
  EXPECT_EQ(bv.variance, 0.0);
  EXPECT_EQ(bv.mse, 0.0);
}

TEST(BiasVariance, Identity) {
  Rng rng(5);
  std::vector<double> e(50);
  for (double& x : e) x = 0.2 + 0.1 * uniform01(rng);
  const BiasVariance bv = bias_variance(e, 0.21);
  EXPECT_NEAR(bv.bias_squared + bv.variance, bv.mse, 1e-10);
  double direct = 0;
  for (double x : e) direct += (x - 0.21) * (x - 0.21);
  EXPECT_NEAR(bv.mse, direct / 50, 1e-12);
}

TEST(TrueRiskMinimizer, MatchesArgminOverCurve) {
  const Membership labels = memberships_from_sizes(equal_block_sizes(30, 3));
  const TieProbabilities p = tie_probabilities(planted_partition(3, 0.1, 4), labels);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(seed);
    const Adjacency y = sample_network(p, rng);
    const auto fits = fit_path(y, 1, 5, seed);
    std::vector<double> errors;
    for (const auto& f : fits) errors.push_back(mse_vs_truth(p, f));
    const int expected = 1 + static_cast<int>(std::min_element(errors.begin(), errors.end()) - errors.begin());
    EXPECT_EQ(true_risk_minimizer(p, fits), expected);
    EXPECT_EQ(true_risk_minimizer(p, y, 1, 5, seed), expected);
  }
}

TEST(TrueRiskMinimizer, ConstantTruthGivesOne) {
  const TieProbabilities p = tie_probabilities(planted_partition(1, 0.05, 2), Membership(120, 0));
  Rng rng(6);
  const Adjacency y = sample_network(p, rng);
  EXPECT_EQ(true_risk_minimizer(p, y, 1, 3, 7), 1);
}

TEST(Monotone, Helpers) {
  EXPECT_TRUE(strictly_increasing({1, 2, 3}));
  EXPECT_FALSE(strictly_increasing({1, 1, 3}));
  EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
  EXPECT_FALSE(strictly_decreasing({3, 4}));
}

TEST(Bootstrap, ClearTrendHasFullConfidence) {
  std::vector<Matrix> grids;
  Rng noise(8);
  for (double scale : {1.0, 2.0, 4.0}) {
    Matrix g(20, 20);
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = scale * uniform01(noise);
    grids.push_back(g);
  }
  Rng rng(9);
  EXPECT_EQ(bootstrap_confidence(grids, strictly_increasing, 200, rng), 1.0);
  EXPECT_EQ(bootstrap_confidence(grids, strictly_decreasing, 200, rng), 0.0);
}

TEST(Study, GridShapeDeterminismAndPairing) {
  const StudyCell cell{CellId{12, 2, SizeScheme::Equal, 0.1, 5}};
  const Matrix a = risk_estimate_grid(cell, FoldScheme::Latin, 3, 2, 2, 3, 10);
  ASSERT_EQ(a.rows(), 2);
  ASSERT_EQ(a.cols(), 3);
  EXPECT_EQ(a, risk_estimate_grid(cell, FoldScheme::Latin, 3, 2, 2, 3, 10));
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_THROW(variance_decomposition(cell, FoldScheme::Ncv, 3, 2, 1, 3, 10), std::invalid_argument);
  EXPECT_THROW(variance_decomposition(cell, FoldScheme::Ncv, 3, 2, 3, 1, 10), std::invalid_argument);
}

TEST(Study, TrueRiskExceedsNoise) {
  const StudyCell cell{CellId{20, 2, SizeScheme::Equal, 0.1, 5}};
  const double noise = bernoulli_noise(cell.truth());
  const double r = true_risk(cell, 2, 10, 11);
  EXPECT_GT(r, noise);
  EXPECT_LT(r, noise + 0.05);
}
