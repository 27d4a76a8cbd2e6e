#pragma once

#include "sbmcv/folds.hpp"
#include "sbmcv/sbm_fit.hpp"
#include "sbmcv/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace sbmcv {

// Which normalisation drives selection and reporting. Selection is identical
// under both for a fixed assignment.
enum class RiskNormalization { PerValidated, AllDyads };

struct RiskEstimate {
  FoldScheme scheme = FoldScheme::Latin;
  int folds = 0;
  int blocks = 0;
  double risk_all_dyads = 0.0;      // loss sum / n(n-1)
  double risk_per_validated = 0.0;  // loss sum / validated_count
  long long validated_count = 0;
  std::vector<double> fold_losses;  // summed squared error per fold

  double risk(RiskNormalization normalization) const {
    return normalization == RiskNormalization::PerValidated ? risk_per_validated : risk_all_dyads;
  }
};

using RiskCurve = std::vector<RiskEstimate>;

// Mean of (truth - estimate)^2 over the given cells. Throws on no cells.
double mse_loss(const Matrix& truth, const Matrix& estimate, const std::vector<std::pair<int, int>>& cells);
// Same over every off-diagonal cell.
double mse_loss(const Matrix& truth, const Matrix& estimate);

// Y with mask-false dyads replaced by the training density; zero diagonal.
Matrix impute_heldout(const Adjacency& network, const TrainingMask& mask);

// Per-(fold, K) RNG seed so a single-K estimate and a full curve agree.
std::uint64_t fold_fit_seed(std::uint64_t seed, int fold, int blocks);

/// V-fold CV risk of the K-block SBM estimator under a fixed assignment. Each
/// fold is fitted on its training mask (spectral start on the imputed matrix)
/// and scored on its validation dyads.
RiskEstimate cv_risk(const Adjacency& network, int blocks, const FoldAssignment& assignment,
                     std::uint64_t seed, const EmOptions& options = {});

// Risk for every K in [k_min, k_max], sharing one spectral basis per fold.
RiskCurve cv_risk_curve(const Adjacency& network, int k_min, int k_max, const FoldAssignment& assignment,
                        std::uint64_t seed, const EmOptions& options = {});

struct CvSelection {
  int selected_blocks = 0;
  RiskCurve curve;
};

// Index of the smallest value, earliest index on ties.
std::size_t argmin_first(const std::vector<double>& values);

/// Draws one fold assignment from `seed`, shares it across all K, and returns
/// the K with minimum risk (smallest K on ties).
CvSelection select_model_cv(const Adjacency& network, int k_min, int k_max, FoldScheme scheme, int folds,
                            std::uint64_t seed, RiskNormalization normalization = RiskNormalization::PerValidated,
                            const EmOptions& options = {});

// CSV rows: scheme,V,K,risk_paper,risk_per_validated,validated_count
void write_risk_curve_csv(std::ostream& out, const RiskCurve& curve, bool header = true);

}  // namespace sbmcv
