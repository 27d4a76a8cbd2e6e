#pragma once

#include "sbmcv/analysis.hpp"
#include "sbmcv/records.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbmcv {

// overall-accuracy, accuracy-nk, accuracy-rb, mse-nk, confusion,
// true-risk-min, fold-accuracy, var-comp, bias-var.
const std::vector<std::string>& report_table_ids();

struct ReportOptions {
  int k_max = 11;
  // Restrict record-based tables to these methods (empty: all methods).
  std::vector<std::string> methods;
  IntervalKind interval = IntervalKind::Normal;
};

/// Writes one table as CSV built from the files in `results_dir`
/// (records.csv, or the variance-study outputs for var-comp / bias-var).
/// Throws on an unknown id or when the needed records are missing or empty;
/// nothing is written in that case.
void write_report(std::ostream& out, const std::string& results_dir, const std::string& table_id,
                  const ReportOptions& options = {});

// Record-based tables straight from memory.
void write_record_report(std::ostream& out, const std::vector<ReplicateRecord>& records,
                         const std::string& table_id, const ReportOptions& options = {});

}  // namespace sbmcv
