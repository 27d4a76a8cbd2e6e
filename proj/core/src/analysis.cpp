#include "sbmcv/analysis.hpp"

#include "sbmcv/criteria.hpp"
#include "sbmcv/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbmcv {

namespace {

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= n ? 1.0 : 0.0;
  double sum = 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  for (std::size_t i = 0; i <= k; ++i) {
    const double term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * lp + (n - i) * lq;
    sum += std::exp(term);
  }
  return std::min(sum, 1.0);
}

// Smallest p in [0, 1] with f(p) false, f monotone true -> false.
template <typename F>
double bisect(F predicate) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (predicate(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double population_variance(const Vector& values) {
  if (values.minCoeff() == values.maxCoeff()) return 0.0;  // no rounding residue for constant input
  const double mean = values.mean();
  return (values.array() - mean).square().mean();
}

Adjacency study_network(const TieProbabilities& truth, std::uint64_t seed, int index) {
  Rng rng(derive_seed(seed, {hash_string("network"), static_cast<std::uint64_t>(index)}));
  return sample_network(truth, rng);
}

}  // namespace

AccuracySummary accuracy_from_counts(std::size_t correct, std::size_t total, IntervalKind interval) {
  if (total == 0) throw std::invalid_argument("accuracy: no records");
  if (correct > total) throw std::invalid_argument("accuracy: more hits than records");
  AccuracySummary s;
  s.count = total;
  s.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  if (interval == IntervalKind::Normal) {
    const double half = 1.96 * std::sqrt(s.accuracy * (1.0 - s.accuracy) / static_cast<double>(total));
    s.ci_low = std::max(0.0, s.accuracy - half);
    s.ci_high = std::min(1.0, s.accuracy + half);
  } else {
    s.ci_low = correct == 0 ? 0.0 : bisect([&](double p) { return 1.0 - binomial_cdf(correct - 1, total, p) < 0.025; });
    s.ci_high = correct == total ? 1.0 : bisect([&](double p) { return binomial_cdf(correct, total, p) > 0.025; });
  }
  return s;
}

AccuracySummary accuracy(std::span<const ReplicateRecord> records, IntervalKind interval) {
  if (records.empty()) throw std::invalid_argument("accuracy: no records");
  std::size_t correct = 0;
  for (const auto& r : records)
    if (r.ok() && r.k_hat == r.cell.blocks) ++correct;
  AccuracySummary s = accuracy_from_counts(correct, records.size(), interval);
  s.method = records.front().method;
  return s;
}

ConfusionTable confusion(std::span<const ReplicateRecord> records, int k_max) {
  if (k_max < 1) throw std::invalid_argument("confusion: k_max must be >= 1");
  int true_blocks = 0;
  for (const auto& r : records)
    if (r.ok()) true_blocks = std::max(true_blocks, r.cell.blocks);
  ConfusionTable table;
  table.k_max = k_max;
  table.frequencies = Matrix::Zero(k_max + 1, true_blocks);
  table.totals.assign(true_blocks, 0);
  for (const auto& r : records) {
    if (!r.ok() || r.k_hat < 1) continue;
    const int row = std::min(r.k_hat, k_max + 1) - 1;
    table.frequencies(row, r.cell.blocks - 1) += 1.0;
    ++table.totals[r.cell.blocks - 1];
  }
  for (int c = 0; c < true_blocks; ++c)
    if (table.totals[c] > 0) table.frequencies.col(c) /= static_cast<double>(table.totals[c]);
  return table;
}

double mse_vs_truth(const TieProbabilities& truth, const TieProbabilities& estimate) {
  if (truth.nodes() != estimate.nodes()) throw std::invalid_argument("mse_vs_truth: size mismatch");
  return mse_loss(truth.values(), estimate.values());
}

double mse_vs_truth(const TieProbabilities& truth, const FittedSbm& fit) {
  return mse_vs_truth(truth, predict_probabilities(fit));
}

double bernoulli_noise(const TieProbabilities& truth) {
  const int n = truth.nodes();
  if (n < 2) throw std::invalid_argument("bernoulli_noise: need at least two nodes");
  // Diagonal is zero, so it contributes nothing.
  return truth.values().cwiseProduct((1.0 - truth.values().array()).matrix()).sum() / (double(n) * (n - 1));
}

VarianceDecomposition decompose_variance(const Matrix& estimates) {
  if (estimates.rows() < 1 || estimates.cols() < 1) throw std::invalid_argument("decompose_variance: empty grid");
  const Eigen::Index networks = estimates.rows();
  Vector means(networks), within(networks);
  for (Eigen::Index m = 0; m < networks; ++m) {
    const Vector row = estimates.row(m).transpose();
    means(m) = row.mean();
    within(m) = population_variance(row);
  }
  VarianceDecomposition d;
  const double fold_part = within.mean();
  const double network_part = population_variance(means);
  d.total_variance = fold_part + network_part;
  d.total_sd = std::sqrt(d.total_variance);
  if (d.total_variance > 0.0) {
    d.fold_share = fold_part / d.total_variance;
    d.network_share = network_part / d.total_variance;
  }
  return d;
}

BiasVariance bias_variance(std::span<const double> estimates, double true_risk_value) {
  if (estimates.empty()) throw std::invalid_argument("bias_variance: no estimates");
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  BiasVariance bv;
  for (double e : estimates) bv.variance += (e - mean) * (e - mean);
  bv.variance /= static_cast<double>(estimates.size());
  bv.bias_squared = (mean - true_risk_value) * (mean - true_risk_value);
  bv.mse = bv.bias_squared + bv.variance;
  return bv;
}

TieProbabilities StudyCell::truth() const {
  const BlockMatrix blocks = planted_partition(cell.blocks, cell.b, cell.r);
  const auto sizes = block_sizes(cell.sizes, cell.nodes, cell.blocks);
  return tie_probabilities(blocks, memberships_from_sizes(sizes));
}

Matrix risk_estimate_grid(const StudyCell& cell, FoldScheme scheme, int folds, int blocks, int networks,
                          int fold_draws, std::uint64_t seed, const EmOptions& options) {
  if (networks < 1 || fold_draws < 1) throw std::invalid_argument("risk_estimate_grid: empty grid");
  const TieProbabilities truth = cell.truth();
  const std::uint64_t scheme_tag = hash_string(to_string(scheme));
  Matrix estimates(networks, fold_draws);
  for (int m = 0; m < networks; ++m) {
    const Adjacency network = study_network(truth, seed, m);
    for (int f = 0; f < fold_draws; ++f) {
      const auto mu = static_cast<std::uint64_t>(m), fu = static_cast<std::uint64_t>(f);
      const auto vu = static_cast<std::uint64_t>(folds);
      Rng fold_rng(derive_seed(seed, {hash_string("folds"), scheme_tag, vu, mu, fu}));
      const FoldAssignment assignment = assign_folds(scheme, cell.cell.nodes, folds, fold_rng);
      const std::uint64_t fit_seed = derive_seed(seed, {hash_string("fits"), scheme_tag, vu, mu, fu});
      estimates(m, f) = cv_risk(network, blocks, assignment, fit_seed, options).risk_per_validated;
    }
  }
  return estimates;
}

VarianceDecomposition variance_decomposition(const StudyCell& cell, FoldScheme scheme, int folds, int blocks,
                                             int networks, int fold_draws, std::uint64_t seed,
                                             const EmOptions& options) {
  if (networks < 2 || fold_draws < 2) throw std::invalid_argument("variance_decomposition: need M >= 2 and F >= 2");
  return decompose_variance(risk_estimate_grid(cell, scheme, folds, blocks, networks, fold_draws, seed, options));
}

double true_risk(const StudyCell& cell, int blocks, int replicates, std::uint64_t seed, const EmOptions& options) {
  if (replicates < 1) throw std::invalid_argument("true_risk: need at least one replicate");
  const TieProbabilities truth = cell.truth();
  const TrainingMask full = TrainingMask::full(truth.nodes());
  double total = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    const Adjacency network = study_network(truth, derive_seed(seed, {hash_string("truerisk")}), rep);
    Rng fit_rng(derive_seed(seed, {hash_string("truerisk-fit"), static_cast<std::uint64_t>(rep)}));
    const FittedSbm fit = fit_sbm(network, blocks, full, fit_rng, options);
    total += mse_vs_truth(truth, fit);
  }
  return total / replicates + bernoulli_noise(truth);
}

BiasVariance bias_variance_of_risk(const StudyCell& cell, FoldScheme scheme, int folds, int blocks,
                                   double true_risk_value, int replicates, std::uint64_t seed,
                                   const EmOptions& options) {
  const Matrix grid = risk_estimate_grid(cell, scheme, folds, blocks, replicates, 1, seed, options);
  const std::vector<double> estimates(grid.data(), grid.data() + grid.size());
  return bias_variance(estimates, true_risk_value);
}

int true_risk_minimizer(const TieProbabilities& truth, const std::vector<FittedSbm>& fits) {
  if (fits.empty()) throw std::invalid_argument("true_risk_minimizer: no fits");
  std::vector<double> errors;
  errors.reserve(fits.size());
  for (const auto& fit : fits) errors.push_back(mse_vs_truth(truth, fit));
  return fits[argmin_first(errors)].blocks;
}

int true_risk_minimizer(const TieProbabilities& truth, const Adjacency& network, int k_min, int k_max,
                        std::uint64_t seed, const EmOptions& options) {
  return true_risk_minimizer(truth, fit_path(network, k_min, k_max, seed, options));
}

double bootstrap_confidence(const std::vector<Matrix>& estimates,
                            const std::function<bool(const std::vector<double>&)>& holds, int resamples,
                            Rng& rng) {
  if (estimates.empty() || resamples < 1) throw std::invalid_argument("bootstrap_confidence: nothing to resample");
  const Eigen::Index rows = estimates.front().rows();
  for (const auto& e : estimates)
    if (e.rows() != rows) throw std::invalid_argument("bootstrap_confidence: settings must share networks");
  int accepted = 0;
  std::vector<Eigen::Index> pick(rows);
  std::vector<double> sds(estimates.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& p : pick) p = static_cast<Eigen::Index>(uniform_below(rng, static_cast<std::uint64_t>(rows)));
    for (std::size_t s = 0; s < estimates.size(); ++s) {
      Matrix resampled(rows, estimates[s].cols());
      for (Eigen::Index i = 0; i < rows; ++i) resampled.row(i) = estimates[s].row(pick[i]);
      sds[s] = decompose_variance(resampled).total_sd;
    }
    if (holds(sds)) ++accepted;
  }
  return static_cast<double>(accepted) / resamples;
}

bool strictly_increasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) return false;
  return true;
}

bool strictly_decreasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1])) return false;
  return true;
}

}  // namespace sbmcv
