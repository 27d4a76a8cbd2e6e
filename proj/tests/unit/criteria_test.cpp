#include "sbmcv/criteria.hpp"
#include "sbmcv/netgen.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sbmcv;

namespace {

Adjacency planted(int n, int k, double b, double r, std::uint64_t seed) {
  Rng rng(seed);
  return sample_network(tie_probabilities(planted_partition(k, b, r), memberships_from_sizes(equal_block_sizes(n, k))), rng);
}

}  // namespace

TEST(Criteria, DegreesOfFreedom) {
  EXPECT_EQ(sbm_degrees_of_freedom(1), 1);
  EXPECT_EQ(sbm_degrees_of_freedom(2), 5);
  for (int k = 1; k <= 11; ++k) EXPECT_EQ(sbm_degrees_of_freedom(k), k * k + k - 1);
}

TEST(Criteria, AicExamples) {
  EXPECT_DOUBLE_EQ(aic(-100, 1).value, 202);
  EXPECT_DOUBLE_EQ(aic(-100, 2).value, 210);
  EXPECT_EQ(aic(-100, 2).degrees_of_freedom, 5);
  EXPECT_EQ(aic(-100, 2).kind, CriterionKind::Aic);
}

TEST(Criteria, BicExamples) {
  EXPECT_DOUBLE_EQ(bic(-100, 2, 30).value, 200 + 5 * std::log(870.0));
  EXPECT_GT(std::log(12.0), 2.0);
  EXPECT_GT(bic(-100, 1, 4).value, aic(-100, 1).value);
}

TEST(Criteria, UnpenalizedAndDispatch) {
  EXPECT_DOUBLE_EQ(unpenalized(-50, 4).value, 100);
  EXPECT_DOUBLE_EQ(criterion(CriterionKind::Bic, -50, 3, 20).value, bic(-50, 3, 20).value);
  EXPECT_EQ(parse_criterion(to_string(CriterionKind::None)), CriterionKind::None);
  EXPECT_EQ(parse_criterion("aic"), CriterionKind::Aic);
  EXPECT_THROW(parse_criterion("dic"), std::invalid_argument);
}

TEST(Criteria, BicMinusAicIdentityOnFits) {
  const Adjacency y = planted(30, 3, 0.05, 5, 1);
  const auto fits = fit_path(y, 1, 5, 2);
  for (const auto& fit : fits) {
    const double d = sbm_degrees_of_freedom(fit.blocks);
    EXPECT_NEAR(bic(fit.log_likelihood, fit.blocks, 30).value - aic(fit.log_likelihood, fit.blocks).value,
                d * (std::log(30.0 * 29.0) - 2), 1e-12 * std::abs(fit.log_likelihood) + 1e-12);
  }
}

TEST(Criteria, FitPathIsSharedAcrossCriteria) {
  const Adjacency y = planted(30, 2, 0.1, 5, 3);
  const auto fits = fit_path(y, 1, 4, 4);
  const auto again = fit_path(y, 1, 4, 4);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    EXPECT_EQ(fits[i].blocks, static_cast<int>(i) + 1);
    EXPECT_EQ(fits[i].labels, again[i].labels);
    EXPECT_EQ(fits[i].log_likelihood, again[i].log_likelihood);
  }
  for (CriterionKind kind : {CriterionKind::Aic, CriterionKind::Bic, CriterionKind::None}) {
    const IcSelection direct = select_model_ic(y, 1, 4, kind, 4);
    const IcSelection shared = select_by_criterion(fits, kind, 30);
    EXPECT_EQ(direct.selected_blocks, shared.selected_blocks);
    ASSERT_EQ(direct.curve.size(), shared.curve.size());
    for (std::size_t i = 0; i < shared.curve.size(); ++i) EXPECT_EQ(direct.curve[i].value, shared.curve[i].value);
  }
}

TEST(Criteria, SingleCandidate) {
  const Adjacency y = planted(20, 2, 0.1, 5, 5);
  for (CriterionKind kind : {CriterionKind::Aic, CriterionKind::Bic, CriterionKind::None})
    EXPECT_EQ(select_model_ic(y, 1, 1, kind, 6).selected_blocks, 1);
}

TEST(Criteria, BicRecoversClearStructure) {
  const Adjacency y = planted(60, 2, 0.1, 5, 7);
  EXPECT_EQ(select_model_ic(y, 1, 5, CriterionKind::Bic, 8).selected_blocks, 2);
}

// Smoke grid over the harness default candidate range.
TEST(Criteria, LikelihoodAloneAvoidsSmallestModel) {
  int smallest = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Adjacency y = planted(30, 1, 0.05, 2, 300 + seed);
    if (select_model_ic(y, 1, 11, CriterionKind::None, seed).selected_blocks == 1) ++smallest;
  }
  EXPECT_EQ(smallest, 0);
}

TEST(Criteria, EmptyPathRejected) {
  EXPECT_THROW(select_by_criterion({}, CriterionKind::Aic, 10), std::invalid_argument);
}
