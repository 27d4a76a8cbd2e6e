#include "sbmcv/variance_study.hpp"

#include "sbmcv/records.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sbmcv {

namespace {

std::ofstream open_output(const std::string& dir, const char* name) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void check(const VarianceStudyConfig& c) {
  if (c.schemes.empty() || c.fold_counts.empty()) throw std::invalid_argument("variance study: no schemes or folds");
  if (c.candidate_blocks < 1 || c.candidate_blocks > c.cell.nodes)
    throw std::invalid_argument("variance study: candidate K out of range");
}

}  // namespace

std::vector<VarianceStudyRow> run_variance_study(const VarianceStudyConfig& config, bool write_files) {
  check(config);
  if (config.networks < 2 || config.fold_draws < 2)
    throw std::invalid_argument("variance study: need at least 2 networks and 2 fold draws");
  const StudyCell cell{config.cell};
  std::vector<VarianceStudyRow> rows;
  for (FoldScheme scheme : config.schemes)
    for (int v : config.fold_counts) {
      VarianceStudyRow row;
      row.scheme = scheme;
      row.folds = v;
      row.estimates = risk_estimate_grid(cell, scheme, v, config.candidate_blocks, config.networks,
                                         config.fold_draws, config.seed, config.em);
      row.decomposition = decompose_variance(row.estimates);
      rows.push_back(std::move(row));
    }
  if (write_files) {
    std::ofstream est = open_output(config.output_dir, kVarianceEstimatesFile);
    est << "scheme,V,K,network,fold_draw,risk\n";
    for (const auto& row : rows)
      for (Eigen::Index m = 0; m < row.estimates.rows(); ++m)
        for (Eigen::Index f = 0; f < row.estimates.cols(); ++f)
          est << to_string(row.scheme) << ',' << row.folds << ',' << config.candidate_blocks << ',' << m << ',' << f
              << ',' << format_double(row.estimates(m, f)) << '\n';
    std::ofstream sum = open_output(config.output_dir, kVarianceSummaryFile);
    sum << "scheme,V,K,networks,fold_draws,total_sd,fold_share,network_share\n";
    for (const auto& row : rows)
      sum << to_string(row.scheme) << ',' << row.folds << ',' << config.candidate_blocks << ',' << config.networks
          << ',' << config.fold_draws << ',' << format_double(row.decomposition.total_sd) << ','
          << format_double(row.decomposition.fold_share) << ',' << format_double(row.decomposition.network_share)
          << '\n';
  }
  return rows;
}

std::vector<BiasVarianceRow> run_bias_variance_study(const VarianceStudyConfig& config, bool write_files) {
  check(config);
  if (config.truth_replicates < 1 || config.bias_replicates < 1)
    throw std::invalid_argument("bias/variance study: need replicates for the true risk and the estimators");
  const StudyCell cell{config.cell};
  const double risk = true_risk(cell, config.candidate_blocks, config.truth_replicates,
                                derive_seed(config.seed, {hash_string("true-risk")}), config.em);
  std::vector<BiasVarianceRow> rows;
  for (FoldScheme scheme : config.schemes)
    for (int v : config.fold_counts)
      rows.push_back({scheme, v, risk,
                      bias_variance_of_risk(cell, scheme, v, config.candidate_blocks, risk, config.bias_replicates,
                                            config.seed, config.em)});
  if (write_files) {
    std::ofstream out = open_output(config.output_dir, kBiasVarianceFile);
    out << "scheme,V,K,true_risk,bias2,variance,mse\n";
    for (const auto& row : rows)
      out << to_string(row.scheme) << ',' << row.folds << ',' << config.candidate_blocks << ','
          << format_double(row.true_risk) << ',' << format_double(row.result.bias_squared) << ','
          << format_double(row.result.variance) << ',' << format_double(row.result.mse) << '\n';
  }
  return rows;
}

}  // namespace sbmcv
