#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace sbmcv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Block labels are 0-based internally; text formats print them 1-based.
using Membership = std::vector<int>;

/// K x K matrix of tie probabilities, every entry in [0, 1].
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(Matrix values);

  int blocks() const { return static_cast<int>(values_.rows()); }
  double operator()(int from, int to) const { return values_(from, to); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// n x n dyad probabilities with an exactly-zero diagonal.
class TieProbabilities {
 public:
  TieProbabilities() = default;
  explicit TieProbabilities(Matrix values);

  int nodes() const { return static_cast<int>(values_.rows()); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

/// Directed binary network. Stored as doubles so masked products can go
/// straight to Eigen; every entry is 0 or 1 and the diagonal is 0.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(Matrix values);
  static Adjacency empty(int nodes);

  int nodes() const { return static_cast<int>(values_.rows()); }
  bool operator()(int i, int j) const { return values_(i, j) != 0.0; }
  const Matrix& values() const { return values_; }
  long long edge_count() const;
  // Edges / n(n-1).
  double density() const;

  void set(int i, int j, bool edge);

 private:
  Matrix values_;
};

/// Dyads available for fitting (true = observed). The diagonal is always false.
class TrainingMask {
 public:
  TrainingMask() = default;
  explicit TrainingMask(Matrix values);
  static TrainingMask full(int nodes);

  int nodes() const { return static_cast<int>(values_.rows()); }
  bool operator()(int i, int j) const { return values_(i, j) != 0.0; }
  const Matrix& values() const { return values_; }
  long long observed_count() const;

  void set(int i, int j, bool observed);

 private:
  Matrix values_;
};

int label_count(const Membership& labels);

}  // namespace sbmcv
