#pragma once

#include "sbmcv/netgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sbmcv {

// One generator setting of the simulation grid.
struct CellId {
  int nodes = 0;
  int blocks = 1;
  SizeScheme sizes = SizeScheme::Equal;
  double b = 0.0;
  double r = 1.0;

  friend bool operator==(const CellId&, const CellId&) = default;
  std::string key() const;  // stable text form, used for hashing and grouping
};

// One (cell, replicate, method) outcome.
struct ReplicateRecord {
  CellId cell;
  std::string method;
  int replicate = 0;
  std::uint64_t seed = 0;
  int k_hat = 0;
  double mse_true = 0.0;
  std::vector<std::pair<int, double>> curve;  // risk or criterion value per K
  double wall_ms = 0.0;
  std::string status = "ok";
  std::uint64_t network_hash = 0;

  bool ok() const { return status == "ok"; }
};

// Column order of the record CSV.
const std::vector<std::string>& record_columns();

// Shortest round-trip decimal form.
std::string format_double(double value);

std::string format_curve(const std::vector<std::pair<int, double>>& curve);
std::vector<std::pair<int, double>> parse_curve(const std::string& text);

void write_record_header(std::ostream& out);
void write_record(std::ostream& out, const ReplicateRecord& record);
// `include_timing` = false drops wall_ms so runs can be compared byte for byte.
std::string record_line(const ReplicateRecord& record, bool include_timing = true);

ReplicateRecord parse_record(const std::string& line);
// Reads a record CSV (header required). Throws on malformed rows.
std::vector<ReplicateRecord> read_records(std::istream& in);
std::vector<ReplicateRecord> read_records_file(const std::string& path);

// FNV-style hash of the adjacency bits; identifies the shared network of a replicate.
std::uint64_t network_hash(const Adjacency& network);

}  // namespace sbmcv
