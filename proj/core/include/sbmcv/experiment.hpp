#pragma once

#include "sbmcv/criteria.hpp"
#include "sbmcv/cv_risk.hpp"
#include "sbmcv/records.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbmcv {

enum class MethodKind { Cv, Criterion, Modularity, Infomap, TrueRisk };

// Method ids: "latin:10", "random:5", "ncv:3", "aic", "bic", "loglik",
// "modularity", "infomap", "truerisk" (oracle; needs the generating P).
struct MethodSpec {
  MethodKind kind = MethodKind::Cv;
  FoldScheme scheme = FoldScheme::Latin;
  int folds = 0;
  CriterionKind criterion = CriterionKind::Aic;

  std::string id() const;
};

MethodSpec parse_method(std::string_view text);
// Every CV scheme at every fold count, then aic, bic, loglik, modularity, infomap, truerisk.
std::vector<std::string> default_methods(const std::vector<int>& fold_counts);

struct ExperimentConfig {
  std::vector<int> nodes{30, 60, 120, 300};
  std::vector<int> blocks{1, 2, 3, 4, 5};
  std::vector<SizeScheme> sizes{SizeScheme::Equal, SizeScheme::PowerLaw};
  std::vector<double> densities{0.01, 0.05, 0.1};
  std::vector<double> ratios{3, 4, 5};
  int replications = 312;
  std::vector<int> fold_counts{3, 5, 10};
  std::vector<std::string> methods;  // empty: default_methods(fold_counts)
  int k_max = 11;
  std::uint64_t master_seed = 20160817;
  std::string output_dir = "results";
  int workers = 1;
  RiskNormalization normalization = RiskNormalization::PerValidated;
  EmOptions em;

  // Throws std::invalid_argument on empty lists, r*b > 1, bad method ids, ...
  void validate() const;
  std::vector<std::string> method_ids() const;
  std::vector<CellId> cells() const;
};

// Reduced grid with 100 replicates for a single machine.
ExperimentConfig desk_preset();

// JSON round trip. Keys mirror the field names; missing keys keep `base`.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct MethodOutcome {
  int k_hat = 0;
  std::vector<std::pair<int, double>> curve;
  Membership labels;           // community methods and full-data fits
  std::optional<double> mse_true;
};

// Everything a method needs about one network. `fits` is the shared full-data
// path for K = 1..k_max; it is computed on demand when empty.
struct NetworkContext {
  const Adjacency* network = nullptr;
  const TieProbabilities* truth = nullptr;  // optional
  int k_max = 1;
  std::uint64_t fit_seed = 0;
  std::vector<FittedSbm> fits;
  RiskNormalization normalization = RiskNormalization::PerValidated;
  EmOptions em;

  const std::vector<FittedSbm>& fit_path();
};

MethodOutcome run_method(const MethodSpec& method, NetworkContext& context, std::uint64_t seed);

// Seeds of one unit; pure functions of (master, cell, replicate, method).
std::uint64_t network_seed(std::uint64_t master, const CellId& cell, int replicate);
std::uint64_t fit_path_seed(std::uint64_t master, const CellId& cell, int replicate);
std::uint64_t method_seed(std::uint64_t master, const CellId& cell, int replicate, const std::string& method);

Adjacency replicate_network(const ExperimentConfig& config, const CellId& cell, int replicate);

// Records of one (cell, replicate) unit, one per method, in method order.
std::vector<ReplicateRecord> run_unit(const ExperimentConfig& config, const CellId& cell, int replicate);

struct RunOptions {
  bool resume = true;
  // Stop after this many units in total (for interruption tests).
  std::optional<std::size_t> unit_limit;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct RunSummary {
  std::size_t total_units = 0;
  std::size_t resumed_units = 0;
  std::size_t completed_units = 0;
  std::string records_path;
  std::string manifest_path;
};

/// Runs the grid into <output_dir>/records.csv and writes manifest.json.
/// Records are written in (cell, replicate, method) order whatever the worker
/// count. With `resume`, complete units already on disk are kept and a torn
/// tail is truncated.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

inline constexpr const char* kRecordsFile = "records.csv";
inline constexpr const char* kManifestFile = "manifest.json";

std::string library_version();

}  // namespace sbmcv
