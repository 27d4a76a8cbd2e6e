#include "sbmcv/cv_risk.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace sbmcv {

double mse_loss(const Matrix& truth, const Matrix& estimate, const std::vector<std::pair<int, int>>& cells) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (cells.empty()) throw std::invalid_argument("mse_loss: empty cell set");
  double total = 0.0;
  for (const auto& [i, j] : cells) {
    const double d = truth(i, j) - estimate(i, j);
    total += d * d;
  }
  return total / static_cast<double>(cells.size());
}

double mse_loss(const Matrix& truth, const Matrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  const auto n = truth.rows();
  if (n < 2) throw std::invalid_argument("mse_loss: empty cell set");
  Matrix d = truth - estimate;
  d.diagonal().setZero();
  return d.squaredNorm() / static_cast<double>(n * (n - 1));
}

Matrix impute_heldout(const Adjacency& network, const TrainingMask& mask) {
  const double fill = training_density(network, mask);
  const Matrix& m = mask.values();
  Matrix imputed = network.values().cwiseProduct(m);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) == 0.0) imputed(i, j) = fill;
  imputed.diagonal().setZero();
  return imputed;
}

std::uint64_t fold_fit_seed(std::uint64_t seed, int fold, int blocks) {
  return derive_seed(seed, {static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(blocks)});
}

RiskCurve cv_risk_curve(const Adjacency& network, int k_min, int k_max, const FoldAssignment& assignment,
                        std::uint64_t seed, const EmOptions& options) {
  const int n = network.nodes();
  if (assignment.nodes() != n) throw std::invalid_argument("cv_risk: assignment size mismatch");
  if (k_min < 1 || k_max < k_min || k_max > n) throw std::invalid_argument("cv_risk: need 1 <= K <= n");

  const int count = k_max - k_min + 1;
  RiskCurve curve(count);
  for (int c = 0; c < count; ++c) {
    curve[c].scheme = assignment.scheme();
    curve[c].folds = assignment.folds();
    curve[c].blocks = k_min + c;
    curve[c].fold_losses.assign(assignment.folds(), 0.0);
  }

  long long validated = 0;
  for (int fold = 1; fold <= assignment.folds(); ++fold) {
    const auto cells = validation_cells(assignment, fold);
    validated += static_cast<long long>(cells.size());
    if (cells.empty()) continue;
    const TrainingMask mask = training_mask(assignment, fold);
    const SpectralBasis basis(impute_heldout(network, mask));
    for (int c = 0; c < count; ++c) {
      Rng rng(fold_fit_seed(seed, fold, k_min + c));
      const FittedSbm fit = fit_sbm(network, k_min + c, mask, basis, rng, options);
      double loss = 0.0;
      for (const auto& [i, j] : cells) {
        const double d = network.values()(i, j) - fit.block_probs(fit.labels[i], fit.labels[j]);
        loss += d * d;
      }
      curve[c].fold_losses[fold - 1] = loss;
    }
  }
  if (validated == 0) throw std::invalid_argument("cv_risk: assignment validates no dyads");

  const double all_dyads = static_cast<double>(n) * (n - 1);
  for (auto& estimate : curve) {
    double total = 0.0;
    for (double loss : estimate.fold_losses) total += loss;
    estimate.validated_count = validated;
    estimate.risk_all_dyads = total / all_dyads;
    estimate.risk_per_validated = total / static_cast<double>(validated);
  }
  return curve;
}

RiskEstimate cv_risk(const Adjacency& network, int blocks, const FoldAssignment& assignment, std::uint64_t seed,
                     const EmOptions& options) {
  return cv_risk_curve(network, blocks, blocks, assignment, seed, options).front();
}

std::size_t argmin_first(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmin of an empty sequence");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

CvSelection select_model_cv(const Adjacency& network, int k_min, int k_max, FoldScheme scheme, int folds,
                            std::uint64_t seed, RiskNormalization normalization, const EmOptions& options) {
  Rng fold_rng(derive_seed(seed, {hash_string("folds")}));
  const FoldAssignment assignment = assign_folds(scheme, network.nodes(), folds, fold_rng);
  CvSelection selection;
  selection.curve = cv_risk_curve(network, k_min, k_max, assignment, derive_seed(seed, {hash_string("fits")}), options);
  std::vector<double> risks;
  for (const auto& estimate : selection.curve) risks.push_back(estimate.risk(normalization));
  selection.selected_blocks = selection.curve[argmin_first(risks)].blocks;
  return selection;
}

void write_risk_curve_csv(std::ostream& out, const RiskCurve& curve, bool header) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  if (header) out << "scheme,V,K,risk_paper,risk_per_validated,validated_count\n";
  for (const auto& e : curve)
    out << to_string(e.scheme) << ',' << e.folds << ',' << e.blocks << ',' << e.risk_all_dyads << ','
        << e.risk_per_validated << ',' << e.validated_count << '\n';
  out.precision(old);
}

}  // namespace sbmcv
