#include "sbmcv/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbmcv {

BlockMatrix::BlockMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.rows() != values_.cols())
    throw std::invalid_argument("BlockMatrix: must be square with at least one block");
  if ((values_.array() < 0.0).any() || (values_.array() > 1.0).any() || !values_.allFinite())
    throw std::invalid_argument("BlockMatrix: entries must lie in [0, 1]");
}

TieProbabilities::TieProbabilities(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols())
    throw std::invalid_argument("TieProbabilities: matrix must be square");
  if ((values_.array() < 0.0).any() || (values_.array() > 1.0).any() || !values_.allFinite())
    throw std::invalid_argument("TieProbabilities: entries must lie in [0, 1]");
  if ((values_.diagonal().array() != 0.0).any())
    throw std::invalid_argument("TieProbabilities: diagonal must be zero");
}

Adjacency::Adjacency(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols())
    throw std::invalid_argument("Adjacency: matrix must be square");
  if (((values_.array() != 0.0) && (values_.array() != 1.0)).any())
    throw std::invalid_argument("Adjacency: entries must be 0 or 1");
  if ((values_.diagonal().array() != 0.0).any())
    throw std::invalid_argument("Adjacency: self-ties are not allowed");
}

Adjacency Adjacency::empty(int nodes) { return Adjacency(Matrix::Zero(nodes, nodes)); }

long long Adjacency::edge_count() const { return static_cast<long long>(values_.sum()); }

double Adjacency::density() const {
  const double n = static_cast<double>(nodes());
  return n < 2 ? 0.0 : static_cast<double>(edge_count()) / (n * (n - 1.0));
}

void Adjacency::set(int i, int j, bool edge) {
  if (i == j) throw std::invalid_argument("Adjacency: self-ties are not allowed");
  values_(i, j) = edge ? 1.0 : 0.0;
}

TrainingMask::TrainingMask(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols())
    throw std::invalid_argument("TrainingMask: matrix must be square");
  if (((values_.array() != 0.0) && (values_.array() != 1.0)).any())
    throw std::invalid_argument("TrainingMask: entries must be 0 or 1");
  if ((values_.diagonal().array() != 0.0).any())
    throw std::invalid_argument("TrainingMask: diagonal must be false");
}

TrainingMask TrainingMask::full(int nodes) {
  Matrix m = Matrix::Ones(nodes, nodes);
  m.diagonal().setZero();
  return TrainingMask(std::move(m));
}

long long TrainingMask::observed_count() const { return static_cast<long long>(values_.sum()); }

void TrainingMask::set(int i, int j, bool observed) {
  if (i == j) throw std::invalid_argument("TrainingMask: diagonal must be false");
  values_(i, j) = observed ? 1.0 : 0.0;
}

int label_count(const Membership& labels) {
  std::vector<int> seen(labels);
  std::sort(seen.begin(), seen.end());
  return static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

std::string to_string(SizeScheme scheme) {
  return scheme == SizeScheme::Equal ? "equal" : "powerlaw";
}

SizeScheme parse_size_scheme(std::string_view text) {
  if (text == "equal") return SizeScheme::Equal;
  if (text == "powerlaw") return SizeScheme::PowerLaw;
  throw std::invalid_argument("unknown block size scheme: " + std::string(text));
}

BlockMatrix planted_partition(int blocks, double b, double r) {
  if (blocks < 1) throw std::invalid_argument("planted_partition: need at least one block");
  if (b < 0.0 || r <= 1.0) throw std::invalid_argument("planted_partition: need b >= 0 and r > 1");
  if (r * b > 1.0) throw std::invalid_argument("planted_partition: r*b exceeds 1");
  Matrix m = Matrix::Constant(blocks, blocks, b);
  m.diagonal().setConstant(r * b);
  return BlockMatrix(std::move(m));
}

std::vector<int> equal_block_sizes(int nodes, int blocks) {
  if (blocks < 1 || nodes < 1 || blocks > nodes)
    throw std::invalid_argument("equal_block_sizes: need 1 <= K <= n");
  std::vector<int> sizes(blocks, nodes / blocks);
  for (int k = 0; k < nodes % blocks; ++k) ++sizes[k];
  return sizes;
}

std::vector<int> powerlaw_block_sizes(int nodes, int blocks, double shape) {
  if (blocks < 1 || nodes < 1 || blocks > nodes)
    throw std::invalid_argument("powerlaw_block_sizes: need 1 <= K <= n");
  if (shape <= 1.0) throw std::invalid_argument("powerlaw_block_sizes: shape must exceed 1");

  const double x_min = static_cast<double>(nodes) / (3.0 * blocks);
  const double inv = 1.0 / shape;
  const double k = blocks;
  // r = 1 is the smallest order statistic; emit largest first.
  std::vector<double> expected(blocks);
  for (int r = 1; r <= blocks; ++r) {
    const double log_ratio = std::lgamma(k + 1.0) + std::lgamma(k - r + 1.0 - inv) -
                             std::lgamma(k - r + 1.0) - std::lgamma(k + 1.0 - inv);
    expected[blocks - r] = x_min * std::exp(log_ratio);
  }

  // Largest remainder against the expected sizes rescaled to sum to n.
  const double total = std::accumulate(expected.begin(), expected.end(), 0.0);
  std::vector<int> sizes(blocks);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < blocks; ++i) {
    const double quota = expected[i] * nodes / total;
    sizes[i] = static_cast<int>(std::floor(quota));
    assigned += sizes[i];
    remainders.emplace_back(quota - sizes[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; assigned < nodes; ++i, ++assigned) ++sizes[remainders[i].second];

  for (int s : sizes)
    if (s <= 0) throw std::domain_error("powerlaw_block_sizes: a block rounded to zero nodes");
  return sizes;
}

std::vector<int> block_sizes(SizeScheme scheme, int nodes, int blocks) {
  return scheme == SizeScheme::Equal ? equal_block_sizes(nodes, blocks)
                                     : powerlaw_block_sizes(nodes, blocks);
}

Membership memberships_from_sizes(std::span<const int> sizes) {
  Membership labels;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < 0) throw std::invalid_argument("memberships_from_sizes: negative size");
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
  }
  return labels;
}

Matrix block_expectation(const BlockMatrix& blocks, const Membership& labels) {
  const int n = static_cast<int>(labels.size());
  for (int l : labels)
    if (l < 0 || l >= blocks.blocks())
      throw std::out_of_range("tie_probabilities: label outside the block matrix");
  Matrix p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = blocks(labels[i], labels[j]);
  return p;
}

TieProbabilities tie_probabilities(const BlockMatrix& blocks, const Membership& labels) {
  Matrix p = block_expectation(blocks, labels);
  p.diagonal().setZero();
  return TieProbabilities(std::move(p));
}

Adjacency sample_network(const TieProbabilities& probabilities, Rng& rng) {
  const int n = probabilities.nodes();
  Matrix y = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      y(i, j) = uniform01(rng) < probabilities(i, j) ? 1.0 : 0.0;
    }
  return Adjacency(std::move(y));
}

}  // namespace sbmcv
