#pragma once

#include "sbmcv/rng.hpp"
#include "sbmcv/types.hpp"

#include <cstdint>
#include <iosfwd>

namespace sbmcv {

// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
// before taking logs.
inline constexpr double kProbabilityClamp = 1e-9;

struct FittedSbm {
  int blocks = 0;
  // Conditional MLE of B given the hard labels.
  BlockMatrix block_probs;
  Matrix responsibilities;  // n x K, rows on the simplex
  Membership labels;        // row-wise argmax of responsibilities, ties to the smaller label
  Vector prior;             // gamma, on the simplex
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct EmOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
};

// Observed-dyad density (mean of Y over mask-true cells). Throws on an empty mask.
double training_density(const Adjacency& network, const TrainingMask& mask);

/// Left singular vectors of an n x n matrix, ordered by decreasing singular
/// value. Computed once per (network, mask) and reused for every candidate K.
class SpectralBasis {
 public:
  explicit SpectralBasis(const Matrix& imputed);

  int nodes() const { return static_cast<int>(vectors_.rows()); }
  // n x K block of leading left singular vectors.
  Matrix leading(int blocks) const { return vectors_.leftCols(blocks); }
  const Vector& singular_values() const { return singular_values_; }

 private:
  Matrix vectors_;
  Vector singular_values_;
};

// k-means on the rows of the leading K left singular vectors.
Membership spectral_clustering(const SpectralBasis& basis, int blocks, Rng& rng);
Membership spectral_clustering(const Matrix& imputed, int blocks, Rng& rng);

// b_lk = (edges l->k) / (dyads l->k) over mask-true dyads; empty cells fall
// back to the training density.
BlockMatrix mle_block_probabilities(const Adjacency& network, const Membership& labels, int blocks,
                                    const TrainingMask& mask);

// Sum over mask-true dyads of the Bernoulli log-likelihood with clamped b.
double complete_log_likelihood(const Adjacency& network, const BlockMatrix& block_probs,
                               const Membership& labels, const TrainingMask& mask);

/// Mean-field variational EM for the directed SBM, started from hard labels.
///
/// Responsibilities start at 0.9 on the initial label and 0.1/(K-1) elsewhere.
/// Each iteration runs an M-step (soft block counts, prior = column means) and
/// then a parallel E-step over all nodes; it stops when the largest change in
/// the soft block matrix falls below `tolerance`. Running out of iterations is
/// reported through `converged`, never thrown.
FittedSbm variational_em(const Adjacency& network, int blocks, const TrainingMask& mask,
                         const Membership& init, const EmOptions& options = {});

// Spectral clustering on the imputed matrix, then variational EM.
FittedSbm fit_sbm(const Adjacency& network, int blocks, const TrainingMask& mask, Rng& rng,
                  const EmOptions& options = {});
FittedSbm fit_sbm(const Adjacency& network, int blocks, const TrainingMask& mask,
                  const SpectralBasis& basis, Rng& rng, const EmOptions& options = {});

// p_ij = b(label_i, label_j) for i != j, zero diagonal.
TieProbabilities predict_probabilities(const FittedSbm& fit);

// p_ij = tau_i^T B tau_j. Not used by the selection pipeline.
TieProbabilities predict_probabilities_soft(const FittedSbm& fit);

// key=value text record: K, B rows, labels (1-based), gamma, logL, iterations, converged.
void write_fit_record(std::ostream& out, const FittedSbm& fit);
FittedSbm read_fit_record(std::istream& in);

}  // namespace sbmcv
