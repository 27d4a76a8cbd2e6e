#include "sbmcv/folds.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sbmcv {

std::string to_string(FoldScheme scheme) {
  switch (scheme) {
    case FoldScheme::Ncv: return "ncv";
    case FoldScheme::Latin: return "latin";
    case FoldScheme::Random: return "random";
  }
  return "unknown";
}

FoldScheme parse_fold_scheme(std::string_view text) {
  if (text == "ncv") return FoldScheme::Ncv;
  if (text == "latin") return FoldScheme::Latin;
  if (text == "random") return FoldScheme::Random;
  throw std::invalid_argument("unknown fold scheme: " + std::string(text));
}

FoldAssignment::FoldAssignment(Eigen::MatrixXi labels, int folds, FoldScheme scheme)
    : labels_(std::move(labels)), folds_(folds), scheme_(scheme) {
  if (labels_.rows() != labels_.cols()) throw std::invalid_argument("FoldAssignment: matrix must be square");
  if (folds_ < 1) throw std::invalid_argument("FoldAssignment: need at least one fold");
  const int lowest = scheme_ == FoldScheme::Ncv ? 0 : 1;
  for (Eigen::Index i = 0; i < labels_.rows(); ++i)
    for (Eigen::Index j = 0; j < labels_.cols(); ++j) {
      if (i == j) {
        labels_(i, j) = kDiagonal;
      } else if (labels_(i, j) < lowest || labels_(i, j) > folds_) {
        throw std::invalid_argument("FoldAssignment: fold label out of range");
      }
    }
}

long long FoldAssignment::fold_size(int fold) const {
  long long count = 0;
  for (Eigen::Index j = 0; j < labels_.cols(); ++j)
    for (Eigen::Index i = 0; i < labels_.rows(); ++i)
      if (i != j && labels_(i, j) == fold) ++count;
  return count;
}

long long FoldAssignment::validated_count() const {
  long long count = 0;
  for (Eigen::Index j = 0; j < labels_.cols(); ++j)
    for (Eigen::Index i = 0; i < labels_.rows(); ++i)
      if (i != j && labels_(i, j) > 0) ++count;
  return count;
}

namespace {

void check_fold_count(int nodes, int folds) {
  if (nodes < 2) throw std::invalid_argument("fold assignment: need at least two nodes");
  if (folds < 2 || folds > nodes) throw std::invalid_argument("fold assignment: need 2 <= V <= n");
}

Eigen::MatrixXi permute(const Eigen::MatrixXi& base, std::span<const int> rows, std::span<const int> cols) {
  const auto n = base.rows();
  Eigen::MatrixXi out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = base(rows[i], cols[j]);
  return out;
}

}  // namespace

FoldAssignment ncv_from_node_folds(std::span<const int> node_folds, int folds) {
  const auto n = static_cast<Eigen::Index>(node_folds.size());
  Eigen::MatrixXi a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (node_folds[i] < 1 || node_folds[i] > folds)
        throw std::invalid_argument("ncv: node fold out of range");
      a(i, j) = node_folds[i] == node_folds[j] ? node_folds[i] : 0;
    }
  return FoldAssignment(std::move(a), folds, FoldScheme::Ncv);
}

FoldAssignment ncv_assign(int nodes, int folds, Rng& rng) {
  check_fold_count(nodes, folds);
  std::vector<int> node_folds(nodes);
  for (int i = 0; i < nodes; ++i) node_folds[i] = i % folds + 1;
  shuffle(std::span<int>(node_folds), rng);
  return ncv_from_node_folds(node_folds, folds);
}

std::vector<std::vector<int>> idempotent_latin_square(int order) {
  if (order < 1 || order == 2) throw std::invalid_argument("no idempotent latin square of this order");
  std::vector<std::vector<int>> square(order, std::vector<int>(order));
  if (order % 2 == 1) {
    // (c + d) * (order + 1) / 2 is idempotent because 2 is invertible.
    const int half = (order + 1) / 2;
    for (int c = 0; c < order; ++c)
      for (int d = 0; d < order; ++d) square[c][d] = static_cast<int>((static_cast<long long>(c + d) * half) % order);
    return square;
  }
  // Even order: prolong the odd idempotent square of order k = order - 1 along
  // the off-diagonal transversal {(c, c + 1 mod k)}; the new symbol k fills the
  // transversal cells and the displaced symbols form the new row and column.
  const int k = order - 1;
  const auto odd = idempotent_latin_square(k);
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < k; ++d) square[c][d] = d == (c + 1) % k ? k : odd[c][d];
  for (int c = 0; c < k; ++c) square[c][k] = odd[c][(c + 1) % k];
  for (int d = 0; d < k; ++d) square[k][d] = odd[(d - 1 + k) % k][d];
  square[k][k] = k;
  return square;
}

FoldAssignment latin_base(int nodes, int folds) {
  check_fold_count(nodes, folds);
  Eigen::MatrixXi a(nodes, nodes);
  if (folds == 2) {
    // Circulant: offsets 1..h go to fold 1, the rest to fold 2. For even n the
    // offset-h diagonal of the first n/2 rows is switched to fold 1 so that
    // both folds get exactly n(n-1)/2 dyads.
    const int h = (nodes - 1) / 2;
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j) {
        const int offset = (j - i + nodes) % nodes;
        a(i, j) = offset >= 1 && offset <= h ? 1 : 2;
      }
    if (nodes % 2 == 0)
      for (int i = 0; i < nodes / 2; ++i) a(i, i + nodes / 2) = 1;
  } else {
    // Tiling an idempotent latin square puts every fold on the diagonal equally
    // often, so removing the diagonal leaves equal global fold sizes and a
    // per-row/column spread of at most one whenever V divides n.
    const auto square = idempotent_latin_square(folds);
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j) a(i, j) = square[i % folds][j % folds] + 1;
  }
  return FoldAssignment(std::move(a), folds, FoldScheme::Latin);
}

namespace {

// Random transversal of a latin square: one cell per row and column with all
// symbols distinct, as column-per-row. Randomized backtracking with a step
// budget; the main diagonal of an idempotent square is the fallback.
std::vector<int> random_transversal(const std::vector<std::vector<int>>& square, Rng& rng) {
  const int order = static_cast<int>(square.size());
  std::vector<std::vector<int>> choices(order);
  for (int row = 0; row < order; ++row) {
    choices[row].resize(order);
    std::iota(choices[row].begin(), choices[row].end(), 0);
    shuffle(std::span<int>(choices[row]), rng);
  }
  std::vector<int> column(order, -1), cursor(order, 0);
  std::vector<bool> column_used(order, false), symbol_used(order, false);
  long long budget = 64LL * order * order;
  int row = 0;
  while (row >= 0 && row < order && budget-- > 0) {
    if (column[row] >= 0) {  // undo the previous choice for this row
      column_used[column[row]] = false;
      symbol_used[square[row][column[row]]] = false;
      column[row] = -1;
    }
    bool placed = false;
    while (cursor[row] < order) {
      const int c = choices[row][cursor[row]++];
      if (column_used[c] || symbol_used[square[row][c]]) continue;
      column[row] = c;
      column_used[c] = true;
      symbol_used[square[row][c]] = true;
      placed = true;
      break;
    }
    if (placed) {
      ++row;
    } else {
      cursor[row] = 0;
      --row;
    }
  }
  if (row == order) return column;
  std::vector<int> diagonal(order);
  std::iota(diagonal.begin(), diagonal.end(), 0);
  return diagonal;
}

}  // namespace

FoldAssignment latin_assign(int nodes, int folds, Rng& rng) {
  check_fold_count(nodes, folds);
  if (folds == 2) {
    // Two folds admit no idempotent square; relabel nodes of the circulant base.
    std::vector<int> order(nodes);
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span<int>(order), rng);
    return FoldAssignment(permute(latin_base(nodes, 2).labels(), order, order), 2, FoldScheme::Latin);
  }

  // A_ij = L[row_class(i)][col_class(j)]: a row permutation and a column
  // permutation of the tiled square. Row classes are a uniform balanced
  // shuffle. When V divides n, column classes are drawn so that the pairs
  // (row_class(i), col_class(i)) on the diagonal are q = n/V random
  // transversals of L; every fold then loses exactly q dyads to the diagonal.
  const auto square = idempotent_latin_square(folds);
  std::vector<int> row_class(nodes), col_class(nodes);
  for (int i = 0; i < nodes; ++i) row_class[i] = i % folds;
  shuffle(std::span<int>(row_class), rng);

  if (nodes % folds == 0) {
    const int copies = nodes / folds;
    std::vector<std::vector<int>> transversals;
    for (int s = 0; s < copies; ++s) transversals.push_back(random_transversal(square, rng));
    std::vector<std::vector<int>> members(folds);
    for (int i = 0; i < nodes; ++i) members[row_class[i]].push_back(i);
    for (int a = 0; a < folds; ++a) {
      std::vector<int> which(copies);
      std::iota(which.begin(), which.end(), 0);
      shuffle(std::span<int>(which), rng);
      for (int s = 0; s < copies; ++s) col_class[members[a][s]] = transversals[which[s]][a];
    }
  } else {
    for (int i = 0; i < nodes; ++i) col_class[i] = i % folds;
    shuffle(std::span<int>(col_class), rng);
  }

  Eigen::MatrixXi a(nodes, nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) a(i, j) = square[row_class[i]][col_class[j]] + 1;
  return FoldAssignment(std::move(a), folds, FoldScheme::Latin);
}

FoldAssignment random_assign(int nodes, int folds, Rng& rng) {
  if (nodes < 2) throw std::invalid_argument("fold assignment: need at least two nodes");
  const long long cells = static_cast<long long>(nodes) * (nodes - 1);
  if (folds < 2 || folds > cells) throw std::invalid_argument("random_assign: need 2 <= V <= n(n-1)");
  std::vector<int> pool(static_cast<std::size_t>(cells));
  for (long long c = 0; c < cells; ++c) pool[c] = static_cast<int>(c % folds) + 1;
  shuffle(std::span<int>(pool), rng);
  Eigen::MatrixXi a(nodes, nodes);
  std::size_t next = 0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) a(i, j) = i == j ? FoldAssignment::kDiagonal : pool[next++];
  return FoldAssignment(std::move(a), folds, FoldScheme::Random);
}

FoldAssignment assign_folds(FoldScheme scheme, int nodes, int folds, Rng& rng) {
  switch (scheme) {
    case FoldScheme::Ncv: return ncv_assign(nodes, folds, rng);
    case FoldScheme::Latin: return latin_assign(nodes, folds, rng);
    case FoldScheme::Random: return random_assign(nodes, folds, rng);
  }
  throw std::invalid_argument("unknown fold scheme");
}

TrainingMask training_mask(const FoldAssignment& assignment, int fold) {
  if (fold < 1 || fold > assignment.folds()) throw std::out_of_range("training_mask: fold out of range");
  const int n = assignment.nodes();
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = i != j && assignment(i, j) != fold ? 1.0 : 0.0;
  return TrainingMask(std::move(m));
}

std::vector<std::pair<int, int>> validation_cells(const FoldAssignment& assignment, int fold) {
  std::vector<std::pair<int, int>> cells;
  const int n = assignment.nodes();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && assignment(i, j) == fold) cells.emplace_back(i, j);
  return cells;
}

void write_fold_csv(std::ostream& out, const FoldAssignment& assignment) {
  const int n = assignment.nodes();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << assignment(i, j);
    out << '\n';
  }
}

}  // namespace sbmcv
