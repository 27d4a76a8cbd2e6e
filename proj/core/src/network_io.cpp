#include "sbmcv/network_io.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbmcv {

namespace {

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

void write_edge_list(std::ostream& out, const Adjacency& network) {
  const int n = network.nodes();
  out << "n=" << n << '\n';
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (network(i, j)) out << (i + 1) << ' ' << (j + 1) << '\n';
}

Adjacency read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    if (line.rfind("n=", 0) != 0) throw std::runtime_error("edge list: missing 'n=<nodes>' header");
    n = std::stoi(line.substr(2));
    break;
  }
  if (n < 0) throw std::runtime_error("edge list: empty input");
  Adjacency network = Adjacency::empty(n);
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    std::istringstream fields(line);
    int from = 0, to = 0;
    if (!(fields >> from >> to)) throw std::runtime_error("edge list: malformed line '" + line + "'");
    if (from < 1 || from > n || to < 1 || to > n)
      throw std::runtime_error("edge list: node index out of range in '" + line + "'");
    if (from == to) throw std::runtime_error("edge list: self-tie in '" + line + "'");
    network.set(from - 1, to - 1, true);
  }
  return network;
}

void write_dense_csv(std::ostream& out, const Adjacency& network) {
  const int n = network.nodes();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << (network(i, j) ? 1 : 0);
    out << '\n';
  }
}

Adjacency read_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix y(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw std::runtime_error("dense csv: matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) y(i, j) = rows[i][j];
  }
  return Adjacency(std::move(y));
}

void write_matrix_csv(std::ostream& out, const Matrix& values) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << values(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace sbmcv
