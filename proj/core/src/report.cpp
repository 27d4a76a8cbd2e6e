#include "sbmcv/report.hpp"

#include "sbmcv/experiment.hpp"
#include "sbmcv/variance_study.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sbmcv {

namespace {

using Records = std::vector<ReplicateRecord>;

// Methods in first-appearance order.
std::vector<std::string> method_order(const Records& records) {
  std::vector<std::string> order;
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  return order;
}

Records select(const Records& records, const std::function<bool(const ReplicateRecord&)>& keep) {
  Records out;
  for (const auto& r : records)
    if (keep(r)) out.push_back(r);
  return out;
}

template <typename T>
std::vector<T> distinct_sorted(const Records& records, T (*key)(const ReplicateRecord&)) {
  std::vector<T> values;
  for (const auto& r : records) values.push_back(key(r));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

int nodes_of(const ReplicateRecord& r) { return r.cell.nodes; }
int blocks_of(const ReplicateRecord& r) { return r.cell.blocks; }
double density_of(const ReplicateRecord& r) { return r.cell.b; }
double ratio_of(const ReplicateRecord& r) { return r.cell.r; }

std::string accuracy_cell(const Records& records) {
  if (records.empty()) return "";
  return format_double(accuracy(records).accuracy);
}

std::string mean_mse_cell(const Records& records) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records)
    if (r.ok()) {
      sum += r.mse_true;
      ++count;
    }
  return count ? format_double(sum / count) : "";
}

void overall_accuracy(std::ostream& out, const Records& records, const ReportOptions& options) {
  std::vector<AccuracySummary> rows;
  for (const auto& m : method_order(records))
    rows.push_back(accuracy(select(records, [&](const auto& r) { return r.method == m; }), options.interval));
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.accuracy > b.accuracy; });
  out << "method,average,ci_low,ci_high,count\n";
  for (const auto& s : rows)
    out << s.method << ',' << format_double(s.accuracy) << ',' << format_double(s.ci_low) << ','
        << format_double(s.ci_high) << ',' << s.count << '\n';
}

// Rows (outer value, method), one column per inner value.
template <typename Outer, typename Inner>
void two_way(std::ostream& out, const Records& records, const char* outer_name, Outer (*outer)(const ReplicateRecord&),
             Inner (*inner)(const ReplicateRecord&), std::string (*cell)(const Records&)) {
  const auto outer_values = distinct_sorted(records, outer);
  const auto inner_values = distinct_sorted(records, inner);
  out << outer_name << ",method";
  for (const auto& v : inner_values) {
    std::ostringstream label;
    label << v;
    out << ',' << label.str();
  }
  out << '\n';
  for (const auto& o : outer_values)
    for (const auto& m : method_order(records)) {
      std::ostringstream label;
      label << o;
      out << label.str() << ',' << m;
      for (const auto& i : inner_values)
        out << ',' << cell(select(records, [&](const auto& r) { return r.method == m && outer(r) == o && inner(r) == i; }));
      out << '\n';
    }
}

void confusion_table(std::ostream& out, const Records& records, const ReportOptions& options) {
  int true_max = 0;
  for (const auto& r : records) true_max = std::max(true_max, r.cell.blocks);
  out << "method,K_hat";
  for (int k = 1; k <= true_max; ++k) out << ',' << k;
  out << '\n';
  for (const auto& m : method_order(records)) {
    const ConfusionTable t = confusion(select(records, [&](const auto& r) { return r.method == m; }), options.k_max);
    for (int row = 0; row <= options.k_max; ++row) {
      out << m << ',' << (row < options.k_max ? std::to_string(row + 1) : ">" + std::to_string(options.k_max));
      for (int k = 0; k < true_max; ++k)
        out << ',' << (k < t.frequencies.cols() ? format_double(t.frequencies(row, k)) : std::string("0"));
      out << '\n';
    }
  }
}

// Per cell: K minimising the replicate-averaged true-risk curve; counts of
// cells by (K*, K_true) for each network size.
void true_risk_table(std::ostream& out, const Records& all) {
  const Records records = select(all, [](const auto& r) { return r.method == "truerisk" && r.ok(); });
  if (records.empty()) throw std::runtime_error("report true-risk-min: no truerisk records");
  std::map<std::string, std::pair<CellId, std::map<int, std::pair<double, int>>>> cells;
  int k_top = 1, true_max = 1;
  for (const auto& r : records) {
    auto& [cell, curve] = cells[r.cell.key()];
    cell = r.cell;
    for (const auto& [k, value] : r.curve) {
      curve[k].first += value;
      ++curve[k].second;
      k_top = std::max(k_top, k);
    }
    true_max = std::max(true_max, r.cell.blocks);
  }
  std::map<int, Matrix> counts;  // nodes -> K* x K_true
  for (const auto& [key, entry] : cells) {
    const auto& [cell, curve] = entry;
    int best = 0;
    double best_value = 0.0;
    for (const auto& [k, acc] : curve) {
      const double mean = acc.first / acc.second;
      if (best == 0 || mean < best_value) {
        best = k;
        best_value = mean;
      }
    }
    auto [it, inserted] = counts.try_emplace(cell.nodes, Matrix::Zero(k_top, true_max));
    it->second(best - 1, cell.blocks - 1) += 1.0;
  }
  out << "nodes,K_star";
  for (int k = 1; k <= true_max; ++k) out << ',' << k;
  out << '\n';
  for (const auto& [nodes, table] : counts)
    for (int row = 0; row < k_top; ++row) {
      out << nodes << ',' << row + 1;
      for (int k = 0; k < true_max; ++k) out << ',' << static_cast<long long>(table(row, k));
      out << '\n';
    }
}

void fold_accuracy(std::ostream& out, const Records& records, const ReportOptions& options) {
  out << "method,V,accuracy,ci_low,ci_high,count\n";
  std::vector<std::pair<MethodSpec, AccuracySummary>> rows;
  for (const auto& m : method_order(records)) {
    MethodSpec spec;
    try {
      spec = parse_method(m);
    } catch (const std::exception&) {
      continue;
    }
    if (spec.kind != MethodKind::Cv) continue;
    rows.emplace_back(spec, accuracy(select(records, [&](const auto& r) { return r.method == m; }), options.interval));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::pair(to_string(a.first.scheme), a.first.folds) < std::pair(to_string(b.first.scheme), b.first.folds);
  });
  if (rows.empty()) throw std::runtime_error("report fold-accuracy: no cross-validation records");
  for (const auto& [spec, s] : rows)
    out << to_string(spec.scheme) << ',' << spec.folds << ',' << format_double(s.accuracy) << ','
        << format_double(s.ci_low) << ',' << format_double(s.ci_high) << ',' << s.count << '\n';
}

std::string read_study_file(const std::string& dir, const char* name) {
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path + " (run variance-study first)");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (std::count(text.begin(), text.end(), '\n') < 2) throw std::runtime_error(path + " has no rows");
  return text;
}

Records load_records(const std::string& dir) {
  const auto path = (std::filesystem::path(dir) / kRecordsFile).string();
  if (!std::filesystem::exists(path)) throw std::runtime_error("missing " + path);
  return read_records_file(path);
}

}  // namespace

const std::vector<std::string>& report_table_ids() {
  static const std::vector<std::string> ids{"overall-accuracy", "accuracy-nk",   "accuracy-rb",
                                            "mse-nk",           "confusion",     "true-risk-min",
                                            "fold-accuracy",    "var-comp",      "bias-var"};
  return ids;
}

void write_record_report(std::ostream& out, const std::vector<ReplicateRecord>& all, const std::string& table_id,
                         const ReportOptions& options) {
  const auto& ids = report_table_ids();
  if (std::find(ids.begin(), ids.end(), table_id) == ids.end())
    throw std::invalid_argument("unknown table id '" + table_id + "'");
  if (table_id == "var-comp" || table_id == "bias-var")
    throw std::invalid_argument("table '" + table_id + "' is built from variance-study output");
  Records records = options.methods.empty()
                        ? all
                        : select(all, [&](const auto& r) {
                            return std::find(options.methods.begin(), options.methods.end(), r.method) !=
                                   options.methods.end();
                          });
  if (records.empty()) throw std::runtime_error("report " + table_id + ": no records");

  std::ostringstream table;
  if (table_id == "overall-accuracy") overall_accuracy(table, records, options);
  else if (table_id == "accuracy-nk") two_way(table, records, "nodes", nodes_of, blocks_of, accuracy_cell);
  else if (table_id == "accuracy-rb") two_way(table, records, "b", density_of, ratio_of, accuracy_cell);
  else if (table_id == "mse-nk") two_way(table, records, "nodes", nodes_of, blocks_of, mean_mse_cell);
  else if (table_id == "confusion") confusion_table(table, records, options);
  else if (table_id == "true-risk-min") true_risk_table(table, records);
  else if (table_id == "fold-accuracy") fold_accuracy(table, records, options);
  out << table.str();
}

void write_report(std::ostream& out, const std::string& results_dir, const std::string& table_id,
                  const ReportOptions& options) {
  if (table_id == "var-comp") {
    out << read_study_file(results_dir, kVarianceSummaryFile);
    return;
  }
  if (table_id == "bias-var") {
    out << read_study_file(results_dir, kBiasVarianceFile);
    return;
  }
  const auto& ids = report_table_ids();
  if (std::find(ids.begin(), ids.end(), table_id) == ids.end())
    throw std::invalid_argument("unknown table id '" + table_id + "'");
  write_record_report(out, load_records(results_dir), table_id, options);
}

}  // namespace sbmcv
