#include "sbmcv/criteria.hpp"

#include "sbmcv/cv_risk.hpp"

#include <cmath>
#include <stdexcept>

namespace sbmcv {

std::string to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Aic: return "aic";
    case CriterionKind::Bic: return "bic";
    case CriterionKind::None: return "loglik";
  }
  return "unknown";
}

CriterionKind parse_criterion(std::string_view text) {
  if (text == "aic") return CriterionKind::Aic;
  if (text == "bic") return CriterionKind::Bic;
  if (text == "loglik" || text == "none") return CriterionKind::None;
  throw std::invalid_argument("unknown criterion: " + std::string(text));
}

int sbm_degrees_of_freedom(int blocks) {
  if (blocks < 1) throw std::invalid_argument("degrees of freedom: need K >= 1");
  return blocks * blocks + blocks - 1;
}

InformationCriterion aic(double log_likelihood, int blocks) {
  const int d = sbm_degrees_of_freedom(blocks);
  return {CriterionKind::Aic, -2.0 * log_likelihood + 2.0 * d, d, blocks};
}

InformationCriterion bic(double log_likelihood, int blocks, int nodes) {
  if (nodes < 2) throw std::invalid_argument("bic: need at least two nodes");
  const int d = sbm_degrees_of_freedom(blocks);
  const double sample = static_cast<double>(nodes) * (nodes - 1);
  return {CriterionKind::Bic, -2.0 * log_likelihood + d * std::log(sample), d, blocks};
}

InformationCriterion unpenalized(double log_likelihood, int blocks) {
  return {CriterionKind::None, -2.0 * log_likelihood, sbm_degrees_of_freedom(blocks), blocks};
}

InformationCriterion criterion(CriterionKind kind, double log_likelihood, int blocks, int nodes) {
  switch (kind) {
    case CriterionKind::Aic: return aic(log_likelihood, blocks);
    case CriterionKind::Bic: return bic(log_likelihood, blocks, nodes);
    case CriterionKind::None: return unpenalized(log_likelihood, blocks);
  }
  throw std::invalid_argument("unknown criterion");
}

std::vector<FittedSbm> fit_path(const Adjacency& network, int k_min, int k_max, std::uint64_t seed,
                                const EmOptions& options) {
  if (k_min < 1 || k_max < k_min || k_max > network.nodes())
    throw std::invalid_argument("fit_path: need 1 <= K <= n");
  const TrainingMask mask = TrainingMask::full(network.nodes());
  const SpectralBasis basis(impute_heldout(network, mask));
  std::vector<FittedSbm> fits;
  for (int k = k_min; k <= k_max; ++k) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    fits.push_back(fit_sbm(network, k, mask, basis, rng, options));
  }
  return fits;
}

IcSelection select_by_criterion(const std::vector<FittedSbm>& fits, CriterionKind kind, int nodes) {
  if (fits.empty()) throw std::invalid_argument("select_by_criterion: no fits");
  IcSelection selection;
  std::vector<double> values;
  for (const auto& fit : fits) {
    selection.curve.push_back(criterion(kind, fit.log_likelihood, fit.blocks, nodes));
    values.push_back(selection.curve.back().value);
  }
  selection.selected_blocks = selection.curve[argmin_first(values)].blocks;
  return selection;
}

IcSelection select_model_ic(const Adjacency& network, int k_min, int k_max, CriterionKind kind,
                            std::uint64_t seed, const EmOptions& options) {
  return select_by_criterion(fit_path(network, k_min, k_max, seed, options), kind, network.nodes());
}

}  // namespace sbmcv
