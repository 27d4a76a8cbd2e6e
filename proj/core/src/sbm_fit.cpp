#include "sbmcv/sbm_fit.hpp"

#include "sbmcv/cv_risk.hpp"
#include "sbmcv/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sbmcv {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Compressed rows of a 0/1 pattern with an empty diagonal.
class NeighbourLists {
 public:
  template <typename Pattern>
  NeighbourLists(int n, Pattern pattern) : start_(n + 1, 0) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (i != j && pattern(i, j)) index_.push_back(j);
      start_[i + 1] = static_cast<int>(index_.size());
    }
  }

  // Row i of the result is the sum of rows `values(j)` over neighbours j of i.
  RowMatrix sum_rows(const RowMatrix& values) const {
    const auto k = values.cols();
    RowMatrix out = RowMatrix::Zero(values.rows(), k);
    for (std::size_t i = 0; i + 1 < start_.size(); ++i) {
      double* target = out.data() + i * k;
      for (int p = start_[i]; p < start_[i + 1]; ++p) {
        const double* source = values.data() + static_cast<std::ptrdiff_t>(index_[p]) * k;
        for (Eigen::Index c = 0; c < k; ++c) target[c] += source[c];
      }
    }
    return out;
  }

 private:
  std::vector<int> start_;
  std::vector<int> index_;
};

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

void check_shapes(const Adjacency& network, const TrainingMask& mask) {
  if (network.nodes() != mask.nodes())
    throw std::invalid_argument("network and training mask sizes differ");
}

Membership argmax_rows(const Matrix& tau) {
  Membership labels(tau.rows());
  for (Eigen::Index i = 0; i < tau.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index l = 1; l < tau.cols(); ++l)
      if (tau(i, l) > tau(i, best)) best = l;
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

}  // namespace

double training_density(const Adjacency& network, const TrainingMask& mask) {
  check_shapes(network, mask);
  const double observed = mask.values().sum();
  if (observed <= 0.0) throw std::invalid_argument("training mask has no observed dyads");
  return network.values().cwiseProduct(mask.values()).sum() / observed;
}

SpectralBasis::SpectralBasis(const Matrix& imputed) {
  if (imputed.rows() != imputed.cols() || imputed.rows() == 0)
    throw std::invalid_argument("SpectralBasis: matrix must be square and nonempty");
  // Left singular vectors of Y are the eigenvectors of Y Y^T.
  const Matrix gram = imputed * imputed.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral decomposition failed");
  vectors_ = solver.eigenvectors().rowwise().reverse();
  singular_values_ = solver.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
}

Membership spectral_clustering(const SpectralBasis& basis, int blocks, Rng& rng) {
  if (blocks < 1 || blocks > basis.nodes())
    throw std::invalid_argument("spectral_clustering: need 1 <= K <= n");
  if (blocks == 1) return Membership(basis.nodes(), 0);
  return kmeans(basis.leading(blocks), blocks, rng).labels;
}

Membership spectral_clustering(const Matrix& imputed, int blocks, Rng& rng) {
  return spectral_clustering(SpectralBasis(imputed), blocks, rng);
}

BlockMatrix mle_block_probabilities(const Adjacency& network, const Membership& labels, int blocks,
                                    const TrainingMask& mask) {
  check_shapes(network, mask);
  const int n = network.nodes();
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("mle_block_probabilities: label vector has wrong length");
  for (int l : labels)
    if (l < 0 || l >= blocks) throw std::out_of_range("mle_block_probabilities: label out of range");
  const double fallback = training_density(network, mask);

  Matrix edges = Matrix::Zero(blocks, blocks);
  Matrix dyads = Matrix::Zero(blocks, blocks);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!mask(i, j)) continue;
      dyads(labels[i], labels[j]) += 1.0;
      edges(labels[i], labels[j]) += network.values()(i, j);
    }
  Matrix b(blocks, blocks);
  for (int l = 0; l < blocks; ++l)
    for (int k = 0; k < blocks; ++k) b(l, k) = dyads(l, k) > 0.0 ? edges(l, k) / dyads(l, k) : fallback;
  return BlockMatrix(std::move(b));
}

double complete_log_likelihood(const Adjacency& network, const BlockMatrix& block_probs,
                               const Membership& labels, const TrainingMask& mask) {
  check_shapes(network, mask);
  const int k = block_probs.blocks();
  Matrix log_p(k, k), log_q(k, k);
  for (int l = 0; l < k; ++l)
    for (int m = 0; m < k; ++m) {
      const double p = clamp_probability(block_probs(l, m));
      log_p(l, m) = std::log(p);
      log_q(l, m) = std::log1p(-p);
    }
  const int n = network.nodes();
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!mask(i, j)) continue;
      total += network(i, j) ? log_p(labels[i], labels[j]) : log_q(labels[i], labels[j]);
    }
  return total;
}

FittedSbm variational_em(const Adjacency& network, int blocks, const TrainingMask& mask,
                         const Membership& init, const EmOptions& options) {
  check_shapes(network, mask);
  const int n = network.nodes();
  if (blocks < 1 || blocks > n) throw std::invalid_argument("variational_em: need 1 <= K <= n");
  if (static_cast<int>(init.size()) != n)
    throw std::invalid_argument("variational_em: initial labels have wrong length");
  const double density = training_density(network, mask);

  RowMatrix tau(n, blocks);
  if (blocks == 1) {
    tau.setOnes();
  } else {
    tau.setConstant(0.1 / (blocks - 1));
    for (int i = 0; i < n; ++i) {
      if (init[i] < 0 || init[i] >= blocks) throw std::out_of_range("variational_em: label out of range");
      tau(i, init[i]) = 0.9;
    }
  }

  // Neighbour lists of observed edges and of held-out dyads, both directions.
  // Then M tau = colsum(tau) - tau - H tau.
  const Adjacency& y = network;
  const NeighbourLists out_edge_lists(n, [&](int i, int j) { return mask(i, j) && y(i, j); });
  const NeighbourLists in_edge_lists(n, [&](int i, int j) { return mask(j, i) && y(j, i); });
  const NeighbourLists out_held_lists(n, [&](int i, int j) { return !mask(i, j); });
  const NeighbourLists in_held_lists(n, [&](int i, int j) { return !mask(j, i); });

  Matrix b = Matrix::Zero(blocks, blocks);
  Vector gamma(blocks);
  FittedSbm fit;
  fit.blocks = blocks;

  for (int iter = 0; iter < std::max(1, options.max_iterations) + 1; ++iter) {
    // Shared by the M-step and the E-step that follows it.
    const Eigen::RowVectorXd column_sums = tau.colwise().sum();
    const RowMatrix out_edges = out_edge_lists.sum_rows(tau);  // sum_j M_ij Y_ij tau_jk
    const RowMatrix in_edges = in_edge_lists.sum_rows(tau);    // sum_j M_ji Y_ji tau_jk
    RowMatrix out_dyads = -(tau + out_held_lists.sum_rows(tau));  // sum_j M_ij tau_jk
    RowMatrix in_dyads = -(tau + in_held_lists.sum_rows(tau));    // sum_j M_ji tau_jk
    out_dyads.rowwise() += column_sums;
    in_dyads.rowwise() += column_sums;

    // M-step.
    const Matrix numerator = tau.transpose().lazyProduct(out_edges);
    const Matrix denominator = tau.transpose().lazyProduct(out_dyads);
    Matrix next_b(blocks, blocks);
    for (int l = 0; l < blocks; ++l)
      for (int k = 0; k < blocks; ++k)
        next_b(l, k) = denominator(l, k) > 1e-12 ? std::clamp(numerator(l, k) / denominator(l, k), 0.0, 1.0)
                                                 : density;
    gamma = tau.colwise().mean().transpose();
    gamma /= gamma.sum();

    const double change = iter == 0 ? std::numeric_limits<double>::infinity()
                                    : (next_b - b).cwiseAbs().maxCoeff();
    b = next_b;
    if (change < options.tolerance) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= options.max_iterations) break;

    // E-step, all nodes in parallel.
    Matrix logit(blocks, blocks), log_absent(blocks, blocks);
    for (int l = 0; l < blocks; ++l)
      for (int k = 0; k < blocks; ++k) {
        const double p = clamp_probability(b(l, k));
        log_absent(l, k) = std::log1p(-p);
        logit(l, k) = std::log(p) - log_absent(l, k);
      }
    // K is small; lazy products skip the blocked GEMM path.
    RowMatrix log_tau = out_edges.lazyProduct(logit.transpose()) + out_dyads.lazyProduct(log_absent.transpose()) +
                        in_edges.lazyProduct(logit) + in_dyads.lazyProduct(log_absent);
    for (int l = 0; l < blocks; ++l) log_tau.col(l).array() += std::log(std::max(gamma(l), 1e-12));
    for (int i = 0; i < n; ++i) {
      const double top = log_tau.row(i).maxCoeff();
      const Eigen::RowVectorXd w = (log_tau.row(i).array() - top).exp().matrix();
      tau.row(i) = w / w.sum();
    }
    ++fit.iterations;
  }

  fit.responsibilities = tau;
  fit.prior = std::move(gamma);
  fit.labels = argmax_rows(fit.responsibilities);
  fit.block_probs = mle_block_probabilities(network, fit.labels, blocks, mask);
  fit.log_likelihood = complete_log_likelihood(network, fit.block_probs, fit.labels, mask);
  return fit;
}

FittedSbm fit_sbm(const Adjacency& network, int blocks, const TrainingMask& mask,
                  const SpectralBasis& basis, Rng& rng, const EmOptions& options) {
  if (basis.nodes() != network.nodes()) throw std::invalid_argument("fit_sbm: basis size mismatch");
  const Membership init = spectral_clustering(basis, blocks, rng);
  return variational_em(network, blocks, mask, init, options);
}

FittedSbm fit_sbm(const Adjacency& network, int blocks, const TrainingMask& mask, Rng& rng,
                  const EmOptions& options) {
  if (blocks < 1 || blocks > network.nodes()) throw std::invalid_argument("fit_sbm: need 1 <= K <= n");
  return fit_sbm(network, blocks, mask, SpectralBasis(impute_heldout(network, mask)), rng, options);
}

TieProbabilities predict_probabilities(const FittedSbm& fit) {
  const auto n = static_cast<Eigen::Index>(fit.labels.size());
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) p(i, j) = i == j ? 0.0 : fit.block_probs(fit.labels[i], fit.labels[j]);
  return TieProbabilities(std::move(p));
}

TieProbabilities predict_probabilities_soft(const FittedSbm& fit) {
  Matrix p = fit.responsibilities * fit.block_probs.values() * fit.responsibilities.transpose();
  p.diagonal().setZero();
  return TieProbabilities(p.cwiseMax(0.0).cwiseMin(1.0));
}

void write_fit_record(std::ostream& out, const FittedSbm& fit) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "K=" << fit.blocks << '\n';
  for (int l = 0; l < fit.blocks; ++l) {
    out << "B" << (l + 1) << '=';
    for (int k = 0; k < fit.blocks; ++k) out << (k ? "," : "") << fit.block_probs(l, k);
    out << '\n';
  }
  out << "labels=";
  for (std::size_t i = 0; i < fit.labels.size(); ++i) out << (i ? "," : "") << fit.labels[i] + 1;
  out << "\ngamma=";
  for (Eigen::Index l = 0; l < fit.prior.size(); ++l) out << (l ? "," : "") << fit.prior(l);
  out << "\nlogL=" << fit.log_likelihood << "\niterations=" << fit.iterations
      << "\nconverged=" << (fit.converged ? 1 : 0) << '\n';
  out.precision(old);
}

FittedSbm read_fit_record(std::istream& in) {
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("fit record: malformed line '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto numbers = [](const std::string& text) {
    std::vector<double> values;
    std::istringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) values.push_back(std::stod(item));
    return values;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw std::runtime_error("fit record: missing field " + key);
    return it->second;
  };

  FittedSbm fit;
  fit.blocks = std::stoi(require("K"));
  Matrix b(fit.blocks, fit.blocks);
  for (int l = 0; l < fit.blocks; ++l) {
    const auto row = numbers(require("B" + std::to_string(l + 1)));
    if (static_cast<int>(row.size()) != fit.blocks) throw std::runtime_error("fit record: bad B row");
    for (int k = 0; k < fit.blocks; ++k) b(l, k) = row[k];
  }
  fit.block_probs = BlockMatrix(std::move(b));
  for (double label : numbers(require("labels"))) fit.labels.push_back(static_cast<int>(label) - 1);
  const auto gamma = numbers(require("gamma"));
  fit.prior = Eigen::Map<const Vector>(gamma.data(), static_cast<Eigen::Index>(gamma.size()));
  fit.log_likelihood = std::stod(require("logL"));
  fit.iterations = std::stoi(require("iterations"));
  fit.converged = require("converged") == "1";
  // Responsibilities are not persisted; rebuild the hard assignment.
  fit.responsibilities = Matrix::Zero(static_cast<Eigen::Index>(fit.labels.size()), fit.blocks);
  for (std::size_t i = 0; i < fit.labels.size(); ++i) fit.responsibilities(i, fit.labels[i]) = 1.0;
  return fit;
}

}  // namespace sbmcv
