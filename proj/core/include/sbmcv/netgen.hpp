#pragma once

#include "sbmcv/rng.hpp"
#include "sbmcv/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbmcv {

enum class SizeScheme { Equal, PowerLaw };

std::string to_string(SizeScheme scheme);
SizeScheme parse_size_scheme(std::string_view text);

// Constant off-diagonal b, constant diagonal r*b. Throws if r*b > 1.
BlockMatrix planted_partition(int blocks, double b, double r);

// Sizes differing by at most one, remainder given to leading blocks.
std::vector<int> equal_block_sizes(int nodes, int blocks);

// Expected order statistics (largest first) of `blocks` iid Pareto draws with
// x_min = nodes / (3 blocks) and the given shape, rounded by largest remainder
// so they sum to `nodes`. Deterministic.
std::vector<int> powerlaw_block_sizes(int nodes, int blocks, double shape = 1.5);

std::vector<int> block_sizes(SizeScheme scheme, int nodes, int blocks);

// Block-contiguous labelling: the first sizes[0] nodes get label 0, and so on.
Membership memberships_from_sizes(std::span<const int> sizes);

TieProbabilities tie_probabilities(const BlockMatrix& blocks, const Membership& labels);

// Z B Z^T without zeroing the diagonal; this is the matrix with rank <= K.
Matrix block_expectation(const BlockMatrix& blocks, const Membership& labels);

// Independent Bernoulli(p_ij) per off-diagonal dyad, visited row-major.
Adjacency sample_network(const TieProbabilities& probabilities, Rng& rng);

}  // namespace sbmcv
