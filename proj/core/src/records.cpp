#include "sbmcv/records.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sbmcv {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw std::runtime_error("bad number: '" + text + "'");
  return value;
}

template <typename Int>
Int parse_int(const std::string& text, int base = 10) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw std::runtime_error("bad integer: '" + text + "'");
  return value;
}

std::string hex(std::uint64_t value) {
  char buffer[17];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + 16, value, 16);
  return std::string(16 - (ptr - buffer), '0') + std::string(buffer, ptr);
}

std::string clean_status(const std::string& status) {
  std::string out = status;
  for (char& ch : out)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
  return out;
}

}  // namespace

std::string CellId::key() const {
  return "n=" + std::to_string(nodes) + ",K=" + std::to_string(blocks) + ",sizes=" + to_string(sizes) +
         ",b=" + format_double(b) + ",r=" + format_double(r);
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> columns{"n",       "sizes", "b",      "r",       "method",
                                                "replicate", "seed", "K_true", "K_hat",   "mse_true",
                                                "curve",   "wall_ms", "status", "network_hash"};
  return columns;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

std::string format_curve(const std::vector<std::pair<int, double>>& curve) {
  std::string out;
  for (const auto& [k, value] : curve) out += std::to_string(k) + ":" + format_double(value) + ";";
  return out;
}

std::vector<std::pair<int, double>> parse_curve(const std::string& text) {
  std::vector<std::pair<int, double>> curve;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::runtime_error("bad curve entry: '" + item + "'");
    curve.emplace_back(parse_int<int>(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
  }
  return curve;
}

void write_record_header(std::ostream& out) {
  const auto& columns = record_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

std::string record_line(const ReplicateRecord& r, bool include_timing) {
  std::string line = std::to_string(r.cell.nodes) + "," + to_string(r.cell.sizes) + "," + format_double(r.cell.b) +
                     "," + format_double(r.cell.r) + "," + r.method + "," + std::to_string(r.replicate) + "," +
                     std::to_string(r.seed) + "," + std::to_string(r.cell.blocks) + "," + std::to_string(r.k_hat) +
                     "," + format_double(r.mse_true) + "," + format_curve(r.curve) + ",";
  line += include_timing ? format_double(r.wall_ms) : std::string("-");
  line += "," + clean_status(r.status) + "," + hex(r.network_hash);
  return line;
}

void write_record(std::ostream& out, const ReplicateRecord& record) { out << record_line(record) << '\n'; }

ReplicateRecord parse_record(const std::string& line) {
  const auto fields = split(line, ',');
  if (fields.size() != record_columns().size())
    throw std::runtime_error("record has " + std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(record_columns().size()));
  ReplicateRecord r;
  r.cell.nodes = parse_int<int>(fields[0]);
  r.cell.sizes = parse_size_scheme(fields[1]);
  r.cell.b = parse_double(fields[2]);
  r.cell.r = parse_double(fields[3]);
  r.method = fields[4];
  r.replicate = parse_int<int>(fields[5]);
  r.seed = parse_int<std::uint64_t>(fields[6]);
  r.cell.blocks = parse_int<int>(fields[7]);
  r.k_hat = parse_int<int>(fields[8]);
  r.mse_true = parse_double(fields[9]);
  r.curve = parse_curve(fields[10]);
  r.wall_ms = fields[11] == "-" ? 0.0 : parse_double(fields[11]);
  r.status = fields[12];
  r.network_hash = parse_int<std::uint64_t>(fields[13], 16);
  return r;
}

std::vector<ReplicateRecord> read_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("record file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::ostringstream header;
  write_record_header(header);
  if (line + '\n' != header.str()) throw std::runtime_error("record file has an unexpected header");
  std::vector<ReplicateRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(parse_record(line));
  }
  return records;
}

std::vector<ReplicateRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_records(in);
}

std::uint64_t network_hash(const Adjacency& network) {
  std::uint64_t h = 1469598103934665603ULL;
  const int n = network.nodes();
  auto feed = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (int k = 0; k < 4; ++k) feed((static_cast<std::uint64_t>(n) >> (8 * k)) & 0xff);
  std::uint64_t bits = 0;
  int filled = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bits = (bits << 1) | (network(i, j) ? 1u : 0u);
      if (++filled == 8) {
        feed(bits);
        bits = 0;
        filled = 0;
      }
    }
  if (filled) feed(bits);
  return mix64(h);
}

}  // namespace sbmcv
