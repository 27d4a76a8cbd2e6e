#pragma once

#include "sbmcv/sbm_fit.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbmcv {

// None is the unpenalised log-likelihood, kept as a diagnostic baseline.
enum class CriterionKind { Aic, Bic, None };

std::string to_string(CriterionKind kind);
CriterionKind parse_criterion(std::string_view text);

struct InformationCriterion {
  CriterionKind kind = CriterionKind::Aic;
  double value = 0.0;
  int degrees_of_freedom = 0;
  int blocks = 0;
};

// K^2 block probabilities plus K-1 free prior weights.
int sbm_degrees_of_freedom(int blocks);

InformationCriterion aic(double log_likelihood, int blocks);
InformationCriterion bic(double log_likelihood, int blocks, int nodes);
// -2 logL, no penalty.
InformationCriterion unpenalized(double log_likelihood, int blocks);
InformationCriterion criterion(CriterionKind kind, double log_likelihood, int blocks, int nodes);

// Full-data fits for K = k_min..k_max; each K gets its own derived stream.
std::vector<FittedSbm> fit_path(const Adjacency& network, int k_min, int k_max, std::uint64_t seed,
                                const EmOptions& options = {});

struct IcSelection {
  int selected_blocks = 0;
  std::vector<InformationCriterion> curve;
};

// Minimises the criterion over an existing fit path (ties -> smallest K).
IcSelection select_by_criterion(const std::vector<FittedSbm>& fits, CriterionKind kind, int nodes);

IcSelection select_model_ic(const Adjacency& network, int k_min, int k_max, CriterionKind kind,
                            std::uint64_t seed, const EmOptions& options = {});

}  // namespace sbmcv
