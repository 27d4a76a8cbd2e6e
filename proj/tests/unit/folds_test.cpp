#include "sbmcv/folds.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace sbmcv;

namespace {

// Largest minus smallest per-fold count along each row (or column).
int line_spread(const FoldAssignment& a, bool rows) {
  int worst = 0;
  for (int i = 0; i < a.nodes(); ++i) {
    std::vector<int> counts(a.folds() + 1, 0);
    for (int j = 0; j < a.nodes(); ++j)
      if (i != j) ++counts[rows ? a(i, j) : a(j, i)];
    const auto [lo, hi] = std::minmax_element(counts.begin() + 1, counts.end());
    worst = std::max(worst, *hi - *lo);
  }
  return worst;
}

int global_spread(const FoldAssignment& a) {
  long long lo = a.fold_size(1), hi = lo;
  for (int t = 2; t <= a.folds(); ++t) {
    lo = std::min(lo, a.fold_size(t));
    hi = std::max(hi, a.fold_size(t));
  }
  return static_cast<int>(hi - lo);
}

// Every node keeps an outgoing and an incoming training dyad in every fold.
bool node_balanced(const FoldAssignment& a) {
  for (int t = 1; t <= a.folds(); ++t) {
    const TrainingMask mask = training_mask(a, t);
    for (int i = 0; i < a.nodes(); ++i) {
      bool sends = false, receives = false;
      for (int j = 0; j < a.nodes(); ++j) {
        sends = sends || mask(i, j);
        receives = receives || mask(j, i);
      }
      if (!sends || !receives) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Ncv, FourNodeExample) {
  const std::vector<int> node_folds{1, 1, 2, 2};
  const FoldAssignment a = ncv_from_node_folds(node_folds, 2);
  EXPECT_EQ(a(0, 1), 1);
  EXPECT_EQ(a(1, 0), 1);
  EXPECT_EQ(a(2, 3), 2);
  EXPECT_EQ(a(3, 2), 2);
  EXPECT_EQ(a.fold_size(0), 8);
  EXPECT_EQ(a.fold_size(1), 2);
  EXPECT_EQ(a.validated_count(), 4);
  EXPECT_LT(a.validated_count(), 12 / 2);
  EXPECT_EQ(a(0, 0), FoldAssignment::kDiagonal);
  EXPECT_EQ(training_mask(a, 1).observed_count(), 10);
}

TEST(Ncv, StructureAndBalance) {
  Rng rng(1);
  for (int draw = 0; draw < 50; ++draw) {
    const FoldAssignment a = ncv_assign(30, 5, rng);
    // Recover node folds from the diagonal blocks and check the structure.
    std::vector<int> node_fold(30, 0);
    for (int i = 0; i < 30; ++i)
      for (int j = 0; j < 30; ++j)
        if (i != j && a(i, j) > 0) node_fold[i] = a(i, j);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 30; ++i) {
      ASSERT_GT(node_fold[i], 0);
      ++counts[node_fold[i]];
      for (int j = 0; j < 30; ++j)
        if (i != j) {
          EXPECT_EQ(a(i, j), node_fold[i] == node_fold[j] ? node_fold[i] : 0);
        }
    }
    for (int t = 1; t <= 5; ++t) EXPECT_EQ(counts[t], 6);
    EXPECT_LT(a.validated_count(), 30 * 29);
    EXPECT_TRUE(node_balanced(a));
  }
}

TEST(Ncv, TrainingFraction) {
  Rng rng(2);
  const FoldAssignment a = ncv_assign(60, 5, rng);
  for (int t = 1; t <= 5; ++t) {
    const double fraction = static_cast<double>(training_mask(a, t).observed_count()) / (60 * 59);
    EXPECT_NEAR(fraction, 24.0 / 25.0, 0.01);
  }
}

TEST(Ncv, RejectsTooManyFolds) {
  Rng rng(3);
  EXPECT_THROW(ncv_assign(4, 5, rng), std::invalid_argument);
  EXPECT_THROW(latin_assign(4, 5, rng), std::invalid_argument);
  EXPECT_THROW(ncv_assign(4, 1, rng), std::invalid_argument);
}

TEST(Latin, SixNodesThreeFolds) {
  Rng rng(4);
  for (int draw = 0; draw < 100; ++draw) {
    const FoldAssignment a = draw == 0 ? latin_base(6, 3) : latin_assign(6, 3, rng);
    for (int t = 1; t <= 3; ++t) {
      EXPECT_EQ(a.fold_size(t), 10);
      EXPECT_EQ(training_mask(a, t).observed_count(), 20);
    }
    for (int i = 0; i < 6; ++i) {
      std::vector<int> counts(4, 0);
      for (int j = 0; j < 6; ++j)
        if (i != j) ++counts[a(i, j)];
      for (int t = 1; t <= 3; ++t) EXPECT_TRUE(counts[t] == 1 || counts[t] == 2);
    }
  }
}

TEST(Latin, SquareCaseHasEachFoldAtMostOncePerRow) {
  const FoldAssignment a = latin_base(3, 3);
  for (int i = 0; i < 3; ++i) {
    std::set<int> seen;
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_TRUE(seen.insert(a(i, j)).second);
      }
  }
}

TEST(Latin, BalancedAcrossGrid) {
  Rng rng(5);
  for (int n : {30, 60}) {
    for (int v : {2, 3, 5, 10}) {
      for (int draw = 0; draw < 20; ++draw) {
        const FoldAssignment a = latin_assign(n, v, rng);
        for (int t = 1; t <= v; ++t) EXPECT_EQ(a.fold_size(t), n * (n - 1) / v);
        EXPECT_LE(line_spread(a, true), 1);
        EXPECT_LE(line_spread(a, false), 1);
        EXPECT_EQ(a.fold_size(0), 0);
        EXPECT_EQ(a.validated_count(), n * (n - 1));
      }
    }
  }
}

TEST(Latin, NonDividingFoldCountStaysNearBalanced) {
  Rng rng(6);
  const FoldAssignment a = latin_assign(7, 3, rng);
  EXPECT_EQ(a.validated_count(), 42);
  EXPECT_LE(global_spread(a), 3);
  const FoldAssignment b = latin_assign(11, 4, rng);
  EXPECT_EQ(b.validated_count(), 110);
}

TEST(Latin, IdempotentSquares) {
  for (int order : {1, 3, 4, 5, 6, 7, 10}) {
    const auto square = idempotent_latin_square(order);
    for (int c = 0; c < order; ++c) {
      EXPECT_EQ(square[c][c], c);
      std::set<int> row, col;
      for (int d = 0; d < order; ++d) {
        row.insert(square[c][d]);
        col.insert(square[d][c]);
      }
      EXPECT_EQ(static_cast<int>(row.size()), order);
      EXPECT_EQ(static_cast<int>(col.size()), order);
    }
  }
  EXPECT_THROW(idempotent_latin_square(2), std::invalid_argument);
}

TEST(Random, FourNodesTwoFoldsFrequency) {
  Rng rng(7);
  Eigen::MatrixXi ones = Eigen::MatrixXi::Zero(4, 4);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const FoldAssignment a = random_assign(4, 2, rng);
    ASSERT_EQ(a.fold_size(1), 6);
    ASSERT_EQ(a.fold_size(2), 6);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j && a(i, j) == 1) ++ones(i, j);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) {
        EXPECT_NEAR(static_cast<double>(ones(i, j)) / draws, 0.5, 0.015);
      }
}

TEST(Random, LeaveOneOut) {
  Rng rng(8);
  const FoldAssignment a = random_assign(4, 12, rng);
  for (int t = 1; t <= 12; ++t) EXPECT_EQ(a.fold_size(t), 1);
  EXPECT_THROW(random_assign(4, 13, rng), std::invalid_argument);
}

TEST(Random, SizesDifferByAtMostOne) {
  Rng rng(9);
  for (int v : {3, 5, 7, 10}) EXPECT_LE(global_spread(random_assign(30, v, rng)), 1);
}

TEST(Latin, KeepsNodeBalance) {
  Rng rng(13);
  for (int d = 0; d < 200; ++d) EXPECT_TRUE(node_balanced(latin_assign(5, 5, rng)));
}

TEST(Random, NodeBalanceCanFail) {
  Rng rng(10);
  bool witnessed = false;
  for (int d = 0; d < 100000 && !witnessed; ++d) witnessed = !node_balanced(random_assign(5, 5, rng));
  EXPECT_TRUE(witnessed);
}

TEST(Folds, ValidationAndTrainingPartitionOffDiagonal) {
  Rng rng(11);
  for (FoldScheme scheme : {FoldScheme::Ncv, FoldScheme::Latin, FoldScheme::Random}) {
    const FoldAssignment a = assign_folds(scheme, 12, 3, rng);
    long long validated = 0;
    for (int t = 1; t <= 3; ++t) {
      const TrainingMask mask = training_mask(a, t);
      const auto cells = validation_cells(a, t);
      validated += static_cast<long long>(cells.size());
      EXPECT_EQ(mask.observed_count() + static_cast<long long>(cells.size()), 12 * 11);
      for (const auto& [i, j] : cells) {
        EXPECT_NE(i, j);
        EXPECT_FALSE(mask(i, j));
      }
      for (int i = 0; i < 12; ++i) EXPECT_FALSE(mask(i, i));
    }
    if (scheme == FoldScheme::Ncv)
      EXPECT_LT(validated, 12 * 11);
    else
      EXPECT_EQ(validated, 12 * 11);
  }
}

TEST(Folds, DeterministicGivenSeed) {
  for (FoldScheme scheme : {FoldScheme::Ncv, FoldScheme::Latin, FoldScheme::Random}) {
    Rng a(12), b(12);
    EXPECT_EQ(assign_folds(scheme, 30, 5, a).labels(), assign_folds(scheme, 30, 5, b).labels());
  }
}

TEST(Folds, TrainingMaskRejectsBadFold) {
  const FoldAssignment a = latin_base(6, 3);
  EXPECT_THROW(training_mask(a, 0), std::out_of_range);
  EXPECT_THROW(training_mask(a, 4), std::out_of_range);
}

TEST(Folds, CsvWritesDiagonalSentinel) {
  const std::vector<int> node_folds{1, 2, 1};
  std::ostringstream out;
  write_fold_csv(out, ncv_from_node_folds(node_folds, 2));
  EXPECT_EQ(out.str(), "-1,0,1\n0,-1,0\n1,0,-1\n");
}

TEST(Folds, SchemeNames) {
  for (FoldScheme s : {FoldScheme::Ncv, FoldScheme::Latin, FoldScheme::Random})
    EXPECT_EQ(parse_fold_scheme(to_string(s)), s);
  EXPECT_THROW(parse_fold_scheme("loo"), std::invalid_argument);
}
