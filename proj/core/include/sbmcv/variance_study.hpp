#pragma once

#include "sbmcv/analysis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sbmcv {

struct VarianceStudyConfig {
  CellId cell{60, 2, SizeScheme::Equal, 0.05, 5.0};
  int candidate_blocks = 3;
  int networks = 100;
  int fold_draws = 100;
  std::vector<FoldScheme> schemes{FoldScheme::Ncv, FoldScheme::Latin, FoldScheme::Random};
  std::vector<int> fold_counts{3, 5, 10};
  std::uint64_t seed = 20160817;
  std::string output_dir = "results";
  // Bias/variance against a Monte Carlo true risk; 0 replicates skips it.
  int truth_replicates = 500;
  int bias_replicates = 100;
  EmOptions em;
};

struct VarianceStudyRow {
  FoldScheme scheme = FoldScheme::Latin;
  int folds = 0;
  Matrix estimates;  // networks x fold draws
  VarianceDecomposition decomposition;
};

/// M x F risk grid for every scheme and V on shared networks, plus the
/// total-variance decomposition. Writes variance_estimates.csv and
/// variance_summary.csv (and bias_variance.csv) into output_dir when
/// `write_files` is set.
std::vector<VarianceStudyRow> run_variance_study(const VarianceStudyConfig& config, bool write_files = true);

struct BiasVarianceRow {
  FoldScheme scheme = FoldScheme::Latin;
  int folds = 0;
  double true_risk = 0.0;
  BiasVariance result;
};

std::vector<BiasVarianceRow> run_bias_variance_study(const VarianceStudyConfig& config, bool write_files = true);

inline constexpr const char* kVarianceEstimatesFile = "variance_estimates.csv";
inline constexpr const char* kVarianceSummaryFile = "variance_summary.csv";
inline constexpr const char* kBiasVarianceFile = "bias_variance.csv";

}  // namespace sbmcv
