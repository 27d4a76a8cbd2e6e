// sbmcv command line: network generation, fitting, cross-validation, model
// selection and the simulation harness.

#include "sbmcv/analysis.hpp"
#include "sbmcv/community.hpp"
#include "sbmcv/experiment.hpp"
#include "sbmcv/network_io.hpp"
#include "sbmcv/report.hpp"
#include "sbmcv/variance_study.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace sbmcv;

constexpr const char* kOutputEnv = "SBMCV_OUTPUT_DIR";

std::string default_output_dir(const std::string& fallback) {
  const char* env = std::getenv(kOutputEnv);
  return env && *env ? env : fallback;
}

// Writes to `path`, or stdout for "" / "-".
template <typename F>
void emit(const std::string& path, F write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

Adjacency load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (std::filesystem::path(path).extension() == ".csv") return read_dense_csv(in);
  return read_edge_list(in);
}

struct CellFlags {
  int nodes = 60;
  int blocks = 2;
  std::string sizes = "equal";
  double b = 0.1;
  double r = 5.0;

  void add(CLI::App* app) {
    app->add_option("-n,--nodes", nodes, "Number of nodes")->capture_default_str();
    app->add_option("-k,--blocks", blocks, "Number of blocks")->capture_default_str();
    app->add_option("--sizes", sizes, "Block sizes: equal or powerlaw")->capture_default_str();
    app->add_option("-b,--density", b, "Between-block tie probability b")->capture_default_str();
    app->add_option("-r,--ratio", r, "Within/between ratio r")->capture_default_str();
  }
  CellId cell() const { return {nodes, blocks, parse_size_scheme(sizes), b, r}; }
};

void add_generate(CLI::App& app) {
  auto* cmd = app.add_subcommand("generate", "Sample a planted-partition SBM network");
  auto flags = std::make_shared<CellFlags>();
  flags->add(cmd);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto format = std::make_shared<std::string>("edges");
  auto out = std::make_shared<std::string>();
  auto labels_out = std::make_shared<std::string>();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->add_option("--format", *format, "edges (edge list) or dense (CSV)")
      ->check(CLI::IsMember({"edges", "dense"}))
      ->capture_default_str();
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->add_option("--labels-out", *labels_out, "Also write true block labels (1-based, one per line)");
  cmd->callback([=] {
    const CellId cell = flags->cell();
    const BlockMatrix blocks = planted_partition(cell.blocks, cell.b, cell.r);
    const Membership labels = memberships_from_sizes(block_sizes(cell.sizes, cell.nodes, cell.blocks));
    Rng rng(*seed);
    const Adjacency network = sample_network(tie_probabilities(blocks, labels), rng);
    emit(*out, [&](std::ostream& o) {
      if (*format == "edges") write_edge_list(o, network);
      else write_dense_csv(o, network);
    });
    if (!labels_out->empty())
      emit(*labels_out, [&](std::ostream& o) {
        for (int l : labels) o << l + 1 << '\n';
      });
  });
}

void add_fit(CLI::App& app) {
  auto* cmd = app.add_subcommand("fit", "Fit a K-block SBM to a network (spectral start + variational EM)");
  auto network = std::make_shared<std::string>();
  auto blocks = std::make_shared<int>(2);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto out = std::make_shared<std::string>();
  cmd->add_option("network", *network, "Edge list, or dense .csv")->required();
  cmd->add_option("-k,--blocks", *blocks, "Number of blocks")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->add_option("-o,--out", *out, "Fit record file (default stdout)");
  cmd->callback([=] {
    const Adjacency y = load_network(*network);
    Rng rng(*seed);
    const FittedSbm fit = fit_sbm(y, *blocks, TrainingMask::full(y.nodes()), rng);
    emit(*out, [&](std::ostream& o) { write_fit_record(o, fit); });
  });
}

void add_cv(CLI::App& app) {
  auto* cmd = app.add_subcommand("cv", "Cross-validated risk curve for one network");
  auto network = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>("latin");
  auto folds = std::make_shared<int>(10);
  auto k_max = std::make_shared<int>(11);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto out = std::make_shared<std::string>();
  cmd->add_option("network", *network, "Edge list, or dense .csv")->required();
  cmd->add_option("--scheme", *scheme, "latin, random or ncv")->capture_default_str();
  cmd->add_option("-V,--folds", *folds, "Number of folds")->capture_default_str();
  cmd->add_option("--k-max", *k_max, "Largest candidate K")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->add_option("-o,--out", *out, "Risk-curve CSV (default stdout)");
  cmd->callback([=] {
    const Adjacency y = load_network(*network);
    const CvSelection s = select_model_cv(y, 1, std::min(*k_max, y.nodes()), parse_fold_scheme(*scheme), *folds, *seed);
    emit(*out, [&](std::ostream& o) { write_risk_curve_csv(o, s.curve); });
    std::cerr << "selected K = " << s.selected_blocks << '\n';
  });
}

void add_select(CLI::App& app) {
  auto* cmd = app.add_subcommand("select", "Run one model-selection method on one network");
  auto network = std::make_shared<std::string>();
  auto method = std::make_shared<std::string>("latin:10");
  auto k_max = std::make_shared<int>(11);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto labels_out = std::make_shared<std::string>();
  cmd->add_option("network", *network, "Edge list, or dense .csv")->required();
  cmd->add_option("-m,--method", *method, "latin:V, random:V, ncv:V, aic, bic, loglik, modularity, infomap")
      ->capture_default_str();
  cmd->add_option("--k-max", *k_max, "Largest candidate K")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->add_option("--labels-out", *labels_out, "Write the selected labeling (1-based, one per line)");
  cmd->callback([=] {
    const Adjacency y = load_network(*network);
    NetworkContext context;
    context.network = &y;
    context.k_max = std::min(*k_max, y.nodes());
    context.fit_seed = *seed;
    const MethodSpec spec = parse_method(*method);
    MethodOutcome o = run_method(spec, context, *seed);
    if (o.labels.empty() && spec.kind == MethodKind::Cv) o.labels = context.fit_path()[o.k_hat - 1].labels;
    std::cout << "method=" << spec.id() << "\nK_hat=" << o.k_hat << "\ncurve=" << format_curve(o.curve) << '\n';
    if (!labels_out->empty())
      emit(*labels_out, [&](std::ostream& s) {
        for (int l : o.labels) s << l + 1 << '\n';
      });
  });
}

void add_experiment(CLI::App& app) {
  auto* cmd = app.add_subcommand("experiment", "Run the simulation grid");
  auto c = std::make_shared<ExperimentConfig>();
  auto sizes = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"equal", "powerlaw"});
  auto config_file = std::make_shared<std::string>();
  auto preset = std::make_shared<std::string>("full");
  auto normalization = std::make_shared<std::string>("per-validated");
  auto fresh = std::make_shared<bool>(false);
  auto unit_limit = std::make_shared<std::size_t>(0);
  auto quiet = std::make_shared<bool>(false);

  cmd->add_option("--preset", *preset, "Starting point: full (complete grid) or desk (reduced grid, 100 replicates)")
      ->check(CLI::IsMember({"full", "desk"}))
      ->capture_default_str();
  cmd->add_option("--nodes", c->nodes, "Network sizes");
  cmd->add_option("--blocks", c->blocks, "True block counts");
  cmd->add_option("--sizes", *sizes, "Size schemes (equal, powerlaw)");
  cmd->add_option("--densities", c->densities, "Values of b");
  cmd->add_option("--ratios", c->ratios, "Values of r");
  cmd->add_option("--replications", c->replications, "Networks per cell");
  cmd->add_option("--fold-counts", c->fold_counts, "Values of V");
  cmd->add_option("--methods", c->methods, "Method ids (default: all schemes x fold counts + criteria)");
  cmd->add_option("--k-max", c->k_max, "Largest candidate K");
  cmd->add_option("--seed", c->master_seed, "Master seed");
  cmd->add_option("-o,--output-dir", c->output_dir, std::string("Output directory (default $") + kOutputEnv + " or results)");
  cmd->add_option("-j,--workers", c->workers, "Worker threads");
  cmd->add_option("--normalization", *normalization, "per-validated or all-dyads")
      ->check(CLI::IsMember({"per-validated", "all-dyads"}));
  cmd->add_option("--config", *config_file, "JSON config; its keys override the flags");
  cmd->add_flag("--fresh", *fresh, "Discard existing records instead of resuming");
  cmd->add_option("--unit-limit", *unit_limit, "Stop after this many (cell, replicate) units");
  cmd->add_flag("-q,--quiet", *quiet, "No progress output");

  cmd->callback([=, cmd = cmd] {
    ExperimentConfig config = *preset == "desk" ? desk_preset() : ExperimentConfig{};
    // Explicit flags override the preset.
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--nodes")) config.nodes = c->nodes;
    if (given("--blocks")) config.blocks = c->blocks;
    if (given("--sizes")) {
      config.sizes.clear();
      for (const auto& s : *sizes) config.sizes.push_back(parse_size_scheme(s));
    }
    if (given("--densities")) config.densities = c->densities;
    if (given("--ratios")) config.ratios = c->ratios;
    if (given("--replications")) config.replications = c->replications;
    if (given("--fold-counts")) config.fold_counts = c->fold_counts;
    if (given("--methods")) config.methods = c->methods;
    if (given("--k-max")) config.k_max = c->k_max;
    if (given("--seed")) config.master_seed = c->master_seed;
    config.output_dir = given("--output-dir") ? c->output_dir : default_output_dir(config.output_dir);
    if (given("--workers")) config.workers = c->workers;
    if (given("--normalization"))
      config.normalization =
          *normalization == "all-dyads" ? RiskNormalization::AllDyads : RiskNormalization::PerValidated;
    if (!config_file->empty()) config = load_config_file(*config_file, config);

    RunOptions options;
    options.resume = !*fresh;
    if (*unit_limit > 0) options.unit_limit = *unit_limit;
    if (!*quiet)
      options.progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 10 == 0) std::cerr << "\r" << done << "/" << total << " units" << std::flush;
      };
    const RunSummary s = run_experiment(config, options);
    if (!*quiet) std::cerr << '\n';
    std::cout << "records=" << s.records_path << "\nmanifest=" << s.manifest_path << "\nunits=" << s.completed_units
              << "/" << s.total_units << " (resumed " << s.resumed_units << ")\n";
  });
}

void add_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "Summarise experiment or variance-study results as a CSV table");
  auto table = std::make_shared<std::string>();
  auto dir = std::make_shared<std::string>(default_output_dir("results"));
  auto out = std::make_shared<std::string>();
  auto options = std::make_shared<ReportOptions>();
  auto exact = std::make_shared<bool>(false);
  cmd->add_option("table-id", *table, "Table id")->required()->check(CLI::IsMember(report_table_ids()));
  cmd->add_option("-d,--dir", *dir, std::string("Results directory (default $") + kOutputEnv + " or results)");
  cmd->add_option("-o,--out", *out, "Output CSV (default stdout)");
  cmd->add_option("--k-max", options->k_max, "Rows of the confusion table before the overflow row")
      ->capture_default_str();
  cmd->add_option("--methods", options->methods, "Only these methods");
  cmd->add_flag("--exact-ci", *exact, "Clopper-Pearson intervals instead of the normal approximation");
  cmd->callback([=] {
    options->interval = *exact ? IntervalKind::ClopperPearson : IntervalKind::Normal;
    std::ostringstream table_text;
    write_report(table_text, *dir, *table, *options);
    emit(*out, [&](std::ostream& o) { o << table_text.str(); });
  });
}

void add_variance_study(CLI::App& app) {
  auto* cmd = app.add_subcommand("variance-study", "Fold/network variance decomposition of CV risk estimates");
  auto c = std::make_shared<VarianceStudyConfig>();
  c->output_dir = default_output_dir(c->output_dir);
  auto flags = std::make_shared<CellFlags>();
  flags->b = 0.05;
  flags->add(cmd);
  auto schemes = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"ncv", "latin", "random"});
  auto bias = std::make_shared<bool>(false);
  cmd->add_option("--candidate-k", c->candidate_blocks, "K whose risk is estimated")->capture_default_str();
  cmd->add_option("--networks", c->networks, "Networks (M)")->capture_default_str();
  cmd->add_option("--fold-draws", c->fold_draws, "Fold assignments per network (F)")->capture_default_str();
  cmd->add_option("--schemes", *schemes, "Fold schemes");
  cmd->add_option("--fold-counts", c->fold_counts, "Values of V");
  cmd->add_option("--seed", c->seed, "Seed")->capture_default_str();
  cmd->add_option("-o,--output-dir", c->output_dir, "Output directory");
  cmd->add_flag("--bias-variance", *bias, "Also estimate bias^2/variance against a Monte Carlo true risk");
  cmd->add_option("--truth-replicates", c->truth_replicates, "Full-data fits for the true risk")->capture_default_str();
  cmd->add_option("--bias-replicates", c->bias_replicates, "Networks for the bias/variance study")
      ->capture_default_str();
  cmd->callback([=] {
    c->cell = flags->cell();
    c->schemes.clear();
    for (const auto& s : *schemes) c->schemes.push_back(parse_fold_scheme(s));
    const auto rows = run_variance_study(*c);
    std::cout << "scheme,V,total_sd,fold_share,network_share\n";
    for (const auto& row : rows)
      std::cout << to_string(row.scheme) << ',' << row.folds << ',' << format_double(row.decomposition.total_sd) << ','
                << format_double(row.decomposition.fold_share) << ','
                << format_double(row.decomposition.network_share) << '\n';
    if (*bias) {
      const auto bv = run_bias_variance_study(*c);
      std::cout << "scheme,V,true_risk,bias2,variance,mse\n";
      for (const auto& row : bv)
        std::cout << to_string(row.scheme) << ',' << row.folds << ',' << format_double(row.true_risk) << ','
                  << format_double(row.result.bias_squared) << ',' << format_double(row.result.variance) << ','
                  << format_double(row.result.mse) << '\n';
    }
  });
}

void add_folds(CLI::App& app) {
  auto* cmd = app.add_subcommand("folds", "Emit a fold assignment matrix (diagonal = -1, 0 = never validated)");
  auto nodes = std::make_shared<int>(30);
  auto folds = std::make_shared<int>(3);
  auto scheme = std::make_shared<std::string>("latin");
  auto seed = std::make_shared<std::uint64_t>(1);
  auto base = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  cmd->add_option("-n,--nodes", *nodes, "Number of nodes")->capture_default_str();
  cmd->add_option("-V,--folds", *folds, "Number of folds")->capture_default_str();
  cmd->add_option("--scheme", *scheme, "latin, random or ncv")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->add_flag("--base", *base, "Unpermuted latin base matrix");
  cmd->add_option("-o,--out", *out, "Output CSV (default stdout)");
  cmd->callback([=] {
    Rng rng(*seed);
    const FoldAssignment a = *base ? latin_base(*nodes, *folds) : assign_folds(parse_fold_scheme(*scheme), *nodes, *folds, rng);
    emit(*out, [&](std::ostream& o) { write_fold_csv(o, a); });
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model selection for directed stochastic block models"};
  app.require_subcommand(1);
  add_generate(app);
  add_fit(app);
  add_cv(app);
  add_select(app);
  add_experiment(app);
  add_report(app);
  add_variance_study(app);
  add_folds(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
