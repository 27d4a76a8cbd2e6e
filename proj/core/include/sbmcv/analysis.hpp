#pragma once

#include "sbmcv/cv_risk.hpp"
#include "sbmcv/records.hpp"
#include "sbmcv/rng.hpp"
#include "sbmcv/sbm_fit.hpp"
#include "sbmcv/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sbmcv {

enum class IntervalKind { Normal, ClopperPearson };

struct AccuracySummary {
  std::string method;
  double accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t count = 0;
};

// Share of records with K_hat == K_true. Failed records count as misses.
// Throws on empty input.
AccuracySummary accuracy(std::span<const ReplicateRecord> records, IntervalKind interval = IntervalKind::Normal);
// Same from raw counts.
AccuracySummary accuracy_from_counts(std::size_t correct, std::size_t total,
                                     IntervalKind interval = IntervalKind::Normal);

// Column-normalised frequencies of K_hat (rows 1..k_max plus an overflow row)
// per K_true (columns 1..max K_true seen). Failed records are skipped.
struct ConfusionTable {
  int k_max = 0;
  Matrix frequencies;                 // (k_max + 1) x true_blocks
  std::vector<std::size_t> totals;    // records per column
};
ConfusionTable confusion(std::span<const ReplicateRecord> records, int k_max);

// Mean squared error between P and the hard-label prediction of a fit, over
// all off-diagonal dyads.
double mse_vs_truth(const TieProbabilities& truth, const FittedSbm& fit);
double mse_vs_truth(const TieProbabilities& truth, const TieProbabilities& estimate);

// Mean of p(1-p) over off-diagonal dyads: the irreducible part of the risk.
double bernoulli_noise(const TieProbabilities& truth);

struct VarianceDecomposition {
  double total_variance = 0.0;
  double total_sd = 0.0;
  double fold_share = 0.0;     // mean over networks of the within-network variance
  double network_share = 0.0;  // variance over networks of the per-network mean
};

// `estimates` is networks x fold draws. Population variances throughout.
VarianceDecomposition decompose_variance(const Matrix& estimates);

struct BiasVariance {
  double bias_squared = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

BiasVariance bias_variance(std::span<const double> estimates, double true_risk);

// Generator cell of a study: P is rebuilt from here for each network.
struct StudyCell {
  CellId cell;
  TieProbabilities truth() const;
};

// R-hat(network m, fold draw f) at one candidate K, M x F. Networks depend only
// on (seed, m), so grids for different schemes and V are paired.
Matrix risk_estimate_grid(const StudyCell& cell, FoldScheme scheme, int folds, int blocks, int networks,
                          int fold_draws, std::uint64_t seed, const EmOptions& options = {});

VarianceDecomposition variance_decomposition(const StudyCell& cell, FoldScheme scheme, int folds, int blocks,
                                             int networks, int fold_draws, std::uint64_t seed,
                                             const EmOptions& options = {});

// Monte Carlo over full-data fits: E[mse(P, P-hat_K)] + mean p(1-p).
double true_risk(const StudyCell& cell, int blocks, int replicates, std::uint64_t seed,
                 const EmOptions& options = {});

BiasVariance bias_variance_of_risk(const StudyCell& cell, FoldScheme scheme, int folds, int blocks,
                                   double true_risk_value, int replicates, std::uint64_t seed,
                                   const EmOptions& options = {});

// argmin_K mse_vs_truth over fits (ties -> smallest K).
int true_risk_minimizer(const TieProbabilities& truth, const std::vector<FittedSbm>& fits);
int true_risk_minimizer(const TieProbabilities& truth, const Adjacency& network, int k_min, int k_max,
                        std::uint64_t seed, const EmOptions& options = {});

// Share of bootstrap resamples (rows drawn with replacement, same rows for
// every setting) on which `holds` accepts the per-setting total sds.
double bootstrap_confidence(const std::vector<Matrix>& estimates,
                            const std::function<bool(const std::vector<double>&)>& holds, int resamples,
                            Rng& rng);

bool strictly_increasing(const std::vector<double>& values);
bool strictly_decreasing(const std::vector<double>& values);

}  // namespace sbmcv
