#pragma once

#include "sbmcv/rng.hpp"
#include "sbmcv/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbmcv {

enum class FoldScheme { Ncv, Latin, Random };

std::string to_string(FoldScheme scheme);
FoldScheme parse_fold_scheme(std::string_view text);

/// n x n fold labels. Off-diagonal entries are in {1..V}, or 0 for NCV dyads
/// that are never validated. The diagonal holds kDiagonal and is excluded
/// from every count.
class FoldAssignment {
 public:
  static constexpr int kDiagonal = -1;

  FoldAssignment(Eigen::MatrixXi labels, int folds, FoldScheme scheme);

  int nodes() const { return static_cast<int>(labels_.rows()); }
  int folds() const { return folds_; }
  FoldScheme scheme() const { return scheme_; }
  int operator()(int i, int j) const { return labels_(i, j); }
  const Eigen::MatrixXi& labels() const { return labels_; }

  // Number of off-diagonal dyads carrying `fold` (fold 0 allowed).
  long long fold_size(int fold) const;
  // Dyads that appear in some validation set.
  long long validated_count() const;

 private:
  Eigen::MatrixXi labels_;
  int folds_;
  FoldScheme scheme_;
};

// Node folds a_i are a balanced random partition (counts differ by <= 1);
// dyad (i, j) gets a_i when a_i == a_j and 0 otherwise.
FoldAssignment ncv_assign(int nodes, int folds, Rng& rng);
// Same construction from explicit 1-based node folds.
FoldAssignment ncv_from_node_folds(std::span<const int> node_folds, int folds);

// Row/column-balanced base pattern with independently permuted rows and columns.
FoldAssignment latin_assign(int nodes, int folds, Rng& rng);
// The unpermuted base pattern.
FoldAssignment latin_base(int nodes, int folds);

// Balanced multiset of labels shuffled uniformly over the off-diagonal cells.
FoldAssignment random_assign(int nodes, int folds, Rng& rng);

FoldAssignment assign_folds(FoldScheme scheme, int nodes, int folds, Rng& rng);

// True where A_ij != fold (fold-0 dyads always train); diagonal false.
TrainingMask training_mask(const FoldAssignment& assignment, int fold);
// Off-diagonal cells with A_ij == fold, as (row, col) pairs in row-major order.
std::vector<std::pair<int, int>> validation_cells(const FoldAssignment& assignment, int fold);

// V x V latin square with L[c][c] = c (0-based). Exists for every V except 2.
std::vector<std::vector<int>> idempotent_latin_square(int order);

// CSV of integers, diagonal written as -1.
void write_fold_csv(std::ostream& out, const FoldAssignment& assignment);

}  // namespace sbmcv
