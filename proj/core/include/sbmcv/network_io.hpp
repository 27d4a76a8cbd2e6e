#pragma once

#include "sbmcv/types.hpp"

#include <iosfwd>

namespace sbmcv {

// Edge list: header line "n=<nodes>", then one "i j" pair per line, 1-indexed,
// in row-major order. Blank lines and lines starting with '#' are ignored on read.
void write_edge_list(std::ostream& out, const Adjacency& network);
Adjacency read_edge_list(std::istream& in);

// Dense CSV: n lines of n comma-separated 0/1 values.
void write_dense_csv(std::ostream& out, const Adjacency& network);
Adjacency read_dense_csv(std::istream& in);

// Dense CSV of an arbitrary real matrix (used for tie probabilities).
void write_matrix_csv(std::ostream& out, const Matrix& values);

}  // namespace sbmcv
