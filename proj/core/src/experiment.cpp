#include "sbmcv/experiment.hpp"

#include "sbmcv/analysis.hpp"
#include "sbmcv/community.hpp"

#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sbmcv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return "0.1.0"; }

std::string MethodSpec::id() const {
  switch (kind) {
    case MethodKind::Cv: return to_string(scheme) + ":" + std::to_string(folds);
    case MethodKind::Criterion: return to_string(criterion);
    case MethodKind::Modularity: return "modularity";
    case MethodKind::Infomap: return "infomap";
    case MethodKind::TrueRisk: return "truerisk";
  }
  return {};
}

MethodSpec parse_method(std::string_view text) {
  MethodSpec m;
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    m.kind = MethodKind::Cv;
    m.scheme = parse_fold_scheme(text.substr(0, colon));
    const std::string folds(text.substr(colon + 1));
    std::size_t used = 0;
    try {
      m.folds = std::stoi(folds, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != folds.size() || folds.empty()) throw std::invalid_argument("bad fold count in method '" + std::string(text) + "'");
    if (m.folds < 2) throw std::invalid_argument("method '" + std::string(text) + "' needs at least 2 folds");
    return m;
  }
  if (text == "modularity") m.kind = MethodKind::Modularity;
  else if (text == "infomap") m.kind = MethodKind::Infomap;
  else if (text == "truerisk") m.kind = MethodKind::TrueRisk;
  else {
    m.kind = MethodKind::Criterion;
    m.criterion = parse_criterion(text);
  }
  return m;
}

std::vector<std::string> default_methods(const std::vector<int>& fold_counts) {
  std::vector<std::string> ids;
  for (const char* scheme : {"latin", "random", "ncv"})
    for (int v : fold_counts) ids.push_back(std::string(scheme) + ":" + std::to_string(v));
  for (const char* id : {"aic", "bic", "loglik", "modularity", "infomap", "truerisk"}) ids.emplace_back(id);
  return ids;
}

std::vector<std::string> ExperimentConfig::method_ids() const {
  return methods.empty() ? default_methods(fold_counts) : methods;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  require(!nodes.empty() && !blocks.empty() && !sizes.empty() && !densities.empty() && !ratios.empty() &&
              !fold_counts.empty(),
          "every grid list must be nonempty");
  require(replications >= 1, "replications must be >= 1");
  require(k_max >= 1, "k_max must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  for (int n : nodes) require(n >= 2, "nodes must be >= 2");
  for (int k : blocks) {
    require(k >= 1, "blocks must be >= 1");
    for (int n : nodes) require(k <= n, "blocks exceed nodes");
  }
  for (int v : fold_counts) require(v >= 2, "fold counts must be >= 2");
  for (double b : densities) {
    require(b >= 0.0 && b <= 1.0, "densities must lie in [0, 1]");
    for (double r : ratios) require(r * b <= 1.0, "every (b, r) must satisfy r*b <= 1");
  }
  for (double r : ratios) require(r > 0.0, "ratios must be positive");
  const auto ids = method_ids();
  require(!ids.empty(), "no methods");
  std::set<std::string> unique;
  for (const auto& id : ids) {
    const MethodSpec m = parse_method(id);
    require(m.id() == id, "method id '" + id + "' is not canonical (expected '" + m.id() + "')");
    require(unique.insert(id).second, "duplicate method '" + id + "'");
    if (m.kind == MethodKind::Cv)
      for (int n : nodes) require(m.folds <= n, "method '" + id + "' has more folds than nodes");
  }
  for (int n : nodes)
    for (int k : blocks)
      for (SizeScheme s : sizes) (void)block_sizes(s, n, k);
}

std::vector<CellId> ExperimentConfig::cells() const {
  std::vector<CellId> out;
  for (int n : nodes)
    for (int k : blocks)
      for (SizeScheme s : sizes)
        for (double b : densities)
          for (double r : ratios) out.push_back({n, k, s, b, r});
  return out;
}

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.nodes = {30, 60, 120};
  c.blocks = {1, 2, 3};
  c.sizes = {SizeScheme::Equal};
  c.densities = {0.05, 0.1};
  c.ratios = {4, 5};
  c.replications = 100;
  c.fold_counts = {3, 10};
  c.k_max = 6;
  c.output_dir = "results-desk";
  return c;
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j;
  j["nodes"] = c.nodes;
  j["blocks"] = c.blocks;
  std::vector<std::string> sizes;
  for (SizeScheme s : c.sizes) sizes.push_back(to_string(s));
  j["sizes"] = sizes;
  j["densities"] = c.densities;
  j["ratios"] = c.ratios;
  j["replications"] = c.replications;
  j["fold_counts"] = c.fold_counts;
  j["methods"] = c.method_ids();
  j["k_max"] = c.k_max;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["normalization"] = c.normalization == RiskNormalization::PerValidated ? "per-validated" : "all-dyads";
  j["em_tolerance"] = c.em.tolerance;
  j["em_max_iterations"] = c.em.max_iterations;
  return j;
}

// Settings that change record values; workers and output_dir do not.
json result_fingerprint(const ExperimentConfig& c) {
  json j = config_json(c);
  j.erase("workers");
  j.erase("output_dir");
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known{"nodes",     "blocks",      "sizes",    "densities",    "ratios",
                                           "replications", "fold_counts", "methods", "k_max",        "master_seed",
                                           "output_dir", "workers",    "normalization", "em_tolerance",
                                           "em_max_iterations"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  try {
    if (j.contains("nodes")) base.nodes = j["nodes"].get<std::vector<int>>();
    if (j.contains("blocks")) base.blocks = j["blocks"].get<std::vector<int>>();
    if (j.contains("sizes")) {
      base.sizes.clear();
      for (const auto& s : j["sizes"]) base.sizes.push_back(parse_size_scheme(s.get<std::string>()));
    }
    if (j.contains("densities")) base.densities = j["densities"].get<std::vector<double>>();
    if (j.contains("ratios")) base.ratios = j["ratios"].get<std::vector<double>>();
    if (j.contains("replications")) base.replications = j["replications"].get<int>();
    if (j.contains("fold_counts")) base.fold_counts = j["fold_counts"].get<std::vector<int>>();
    if (j.contains("methods")) base.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("k_max")) base.k_max = j["k_max"].get<int>();
    if (j.contains("master_seed")) base.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) base.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("workers")) base.workers = j["workers"].get<int>();
    if (j.contains("normalization")) {
      const auto n = j["normalization"].get<std::string>();
      if (n == "per-validated") base.normalization = RiskNormalization::PerValidated;
      else if (n == "all-dyads") base.normalization = RiskNormalization::AllDyads;
      else throw std::invalid_argument("config: normalization must be per-validated or all-dyads");
    }
    if (j.contains("em_tolerance")) base.em.tolerance = j["em_tolerance"].get<double>();
    if (j.contains("em_max_iterations")) base.em.max_iterations = j["em_max_iterations"].get<int>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str(), std::move(base));
}

const std::vector<FittedSbm>& NetworkContext::fit_path() {
  if (fits.empty()) fits = sbmcv::fit_path(*network, 1, k_max, fit_seed, em);
  return fits;
}

namespace {

// B-hat by conditional MLE for fixed labels, as a fit object for prediction.
FittedSbm refit_labels(const Adjacency& network, const Membership& labels) {
  FittedSbm fit;
  fit.blocks = label_count(labels);
  fit.labels = labels;
  fit.block_probs = mle_block_probabilities(network, labels, fit.blocks, TrainingMask::full(network.nodes()));
  return fit;
}

}  // namespace

MethodOutcome run_method(const MethodSpec& method, NetworkContext& context, std::uint64_t seed) {
  const Adjacency& network = *context.network;
  MethodOutcome out;
  auto truth_mse = [&](const FittedSbm& fit) -> std::optional<double> {
    if (!context.truth) return std::nullopt;
    return mse_vs_truth(*context.truth, fit);
  };
  switch (method.kind) {
    case MethodKind::Cv: {
      const CvSelection s = select_model_cv(network, 1, context.k_max, method.scheme, method.folds, seed,
                                            context.normalization, context.em);
      out.k_hat = s.selected_blocks;
      for (const auto& e : s.curve) out.curve.emplace_back(e.blocks, e.risk(context.normalization));
      if (context.truth) {
        const FittedSbm& fit = context.fit_path()[out.k_hat - 1];
        out.labels = fit.labels;
        out.mse_true = truth_mse(fit);
      }
      break;
    }
    case MethodKind::Criterion: {
      const auto& fits = context.fit_path();
      const IcSelection s = select_by_criterion(fits, method.criterion, network.nodes());
      out.k_hat = s.selected_blocks;
      for (const auto& c : s.curve) out.curve.emplace_back(c.blocks, c.value);
      out.labels = fits[out.k_hat - 1].labels;
      out.mse_true = truth_mse(fits[out.k_hat - 1]);
      break;
    }
    case MethodKind::Modularity:
    case MethodKind::Infomap: {
      Rng rng(seed);
      const CommunityResult r =
          method.kind == MethodKind::Modularity ? greedy_modularity(network) : infomap(network, rng);
      out.k_hat = r.communities;
      out.curve.emplace_back(r.communities, r.score);
      out.labels = r.labels;
      out.mse_true = truth_mse(refit_labels(network, r.labels));
      break;
    }
    case MethodKind::TrueRisk: {
      if (!context.truth) throw std::invalid_argument("truerisk needs the generating probabilities");
      const auto& fits = context.fit_path();
      std::vector<double> errors;
      for (const auto& fit : fits) {
        errors.push_back(mse_vs_truth(*context.truth, fit));
        out.curve.emplace_back(fit.blocks, errors.back());
      }
      const std::size_t best = argmin_first(errors);
      out.k_hat = fits[best].blocks;
      out.labels = fits[best].labels;
      out.mse_true = errors[best];
      break;
    }
  }
  return out;
}

std::uint64_t network_seed(std::uint64_t master, const CellId& cell, int replicate) {
  return derive_seed(master, {hash_string(cell.key()), static_cast<std::uint64_t>(replicate), hash_string("network")});
}

std::uint64_t fit_path_seed(std::uint64_t master, const CellId& cell, int replicate) {
  return derive_seed(master, {hash_string(cell.key()), static_cast<std::uint64_t>(replicate), hash_string("fit-path")});
}

std::uint64_t method_seed(std::uint64_t master, const CellId& cell, int replicate, const std::string& method) {
  return derive_seed(master, {hash_string(cell.key()), static_cast<std::uint64_t>(replicate), hash_string(method)});
}

Adjacency replicate_network(const ExperimentConfig& config, const CellId& cell, int replicate) {
  const TieProbabilities truth = StudyCell{cell}.truth();
  Rng rng(network_seed(config.master_seed, cell, replicate));
  return sample_network(truth, rng);
}

std::vector<ReplicateRecord> run_unit(const ExperimentConfig& config, const CellId& cell, int replicate) {
  using clock = std::chrono::steady_clock;
  const TieProbabilities truth = StudyCell{cell}.truth();
  Rng rng(network_seed(config.master_seed, cell, replicate));
  const Adjacency network = sample_network(truth, rng);
  const std::uint64_t hash = network_hash(network);

  NetworkContext context;
  context.network = &network;
  context.truth = &truth;
  context.k_max = std::min(config.k_max, cell.nodes);
  context.fit_seed = fit_path_seed(config.master_seed, cell, replicate);
  context.normalization = config.normalization;
  context.em = config.em;

  std::vector<ReplicateRecord> records;
  for (const std::string& id : config.method_ids()) {
    const MethodSpec method = parse_method(id);
    ReplicateRecord r;
    r.cell = cell;
    r.method = id;
    r.replicate = replicate;
    r.network_hash = hash;
    const bool shared = method.kind == MethodKind::Criterion || method.kind == MethodKind::TrueRisk;
    r.seed = shared ? context.fit_seed : method_seed(config.master_seed, cell, replicate, id);
    const auto start = clock::now();
    try {
      const MethodOutcome o = run_method(method, context, r.seed);
      r.k_hat = o.k_hat;
      r.curve = o.curve;
      r.mse_true = o.mse_true.value_or(0.0);
    } catch (const std::exception& e) {
      r.k_hat = 0;
      r.curve.clear();
      r.mse_true = 0.0;
      r.status = std::string("failed: ") + e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

// Number of leading complete units in an existing record file, and the byte
// offset where they end. Anything after is a torn or foreign tail.
std::pair<std::size_t, std::uintmax_t> complete_prefix(const std::string& path, const ExperimentConfig& config,
                                                       const std::vector<CellId>& cells,
                                                       const std::vector<std::string>& methods) {
  std::ifstream in(path, std::ios::binary);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ostringstream header;
  write_record_header(header);
  if (contents.compare(0, header.str().size(), header.str()) != 0) return {0, 0};
  std::uintmax_t offset = header.str().size();
  std::uintmax_t unit_end = offset;
  std::size_t lines = 0, units = 0;
  while (offset < contents.size()) {
    const auto newline = contents.find('\n', offset);
    if (newline == std::string::npos) break;  // torn final line
    const std::string line = contents.substr(offset, newline - offset);
    const std::size_t unit = lines / methods.size();
    if (unit >= cells.size() * config.replications) break;
    const CellId& cell = cells[unit / config.replications];
    ReplicateRecord r;
    try {
      r = parse_record(line);
    } catch (const std::exception&) {
      break;
    }
    if (!(r.cell == cell) ||
        r.replicate != static_cast<int>(unit % config.replications) || r.method != methods[lines % methods.size()])
      break;
    offset = newline + 1;
    ++lines;
    if (lines % methods.size() == 0) {
      units = lines / methods.size();
      unit_end = offset;
    }
  }
  return {units, unit_end};
}

void write_manifest(const std::string& path, const ExperimentConfig& config, std::size_t done, std::size_t total,
                    const std::string& status) {
  json j;
  j["tool"] = "sbmcv";
  j["version"] = library_version();
  j["master_seed"] = config.master_seed;
  j["config"] = config_json(config);
  j["record_columns"] = record_columns();
  j["units_total"] = total;
  j["units_done"] = done;
  j["status"] = status;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto cells = config.cells();
  const auto methods = config.method_ids();
  const std::size_t total = cells.size() * static_cast<std::size_t>(config.replications);

  fs::create_directories(config.output_dir);
  RunSummary summary;
  summary.total_units = total;
  summary.records_path = (fs::path(config.output_dir) / kRecordsFile).string();
  summary.manifest_path = (fs::path(config.output_dir) / kManifestFile).string();

  std::size_t start = 0;
  if (options.resume && fs::exists(summary.records_path)) {
    if (fs::exists(summary.manifest_path)) {
      std::ifstream in(summary.manifest_path);
      json manifest;
      try {
        manifest = json::parse(in);
      } catch (const json::exception&) {
        throw std::runtime_error("unreadable manifest " + summary.manifest_path);
      }
      json previous = manifest.at("config");
      previous.erase("workers");
      previous.erase("output_dir");
      if (previous != result_fingerprint(config))
        throw std::runtime_error("existing results in " + config.output_dir + " were produced by a different config");
    }
    const auto [units, offset] = complete_prefix(summary.records_path, config, cells, methods);
    if (units > 0) {
      fs::resize_file(summary.records_path, offset);
      start = units;
    }
  }
  summary.resumed_units = start;

  std::ofstream out;
  if (start == 0) {
    out.open(summary.records_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + summary.records_path);
    write_record_header(out);
    out.flush();
  } else {
    out.open(summary.records_path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + summary.records_path);
  }
  write_manifest(summary.manifest_path, config, start, total, "running");

  std::size_t stop = total;
  if (options.unit_limit) stop = std::min(stop, std::max(start, *options.unit_limit));

  std::mutex mutex;
  std::condition_variable ready;
  std::map<std::size_t, std::vector<ReplicateRecord>> finished;
  std::size_t next = start;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      std::size_t unit;
      {
        std::lock_guard lock(mutex);
        if (next >= stop || failure) return;
        unit = next++;
      }
      try {
        auto records = run_unit(config, cells[unit / config.replications], static_cast<int>(unit % config.replications));
        std::lock_guard lock(mutex);
        finished.emplace(unit, std::move(records));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
      ready.notify_all();
    }
  };

  const int thread_count = std::max(1, std::min<int>(config.workers, static_cast<int>(stop - start)));
  std::vector<std::thread> threads;
  for (int t = 0; t < thread_count && start < stop; ++t) threads.emplace_back(worker);

  // Single writer: append units strictly in order.
  std::size_t written = start;
  while (written < stop) {
    std::vector<ReplicateRecord> records;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return failure || finished.count(written); });
      if (!finished.count(written)) break;
      records = std::move(finished[written]);
      finished.erase(written);
    }
    for (const auto& r : records) write_record(out, r);
    out.flush();
    if (!out) {
      std::lock_guard lock(mutex);
      failure = std::make_exception_ptr(std::runtime_error("write failed: " + summary.records_path));
      break;
    }
    ++written;
    if (options.progress) options.progress(written, total);
  }
  for (auto& t : threads) t.join();
  out.close();
  summary.completed_units = written;
  write_manifest(summary.manifest_path, config, written, total, written == total ? "complete" : "partial");
  if (failure) std::rethrow_exception(failure);
  return summary;
}

}  // namespace sbmcv
