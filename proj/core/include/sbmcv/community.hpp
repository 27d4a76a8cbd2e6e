#pragma once

#include "sbmcv/rng.hpp"
#include "sbmcv/types.hpp"

namespace sbmcv {

struct CommunityResult {
  Membership labels;  // renumbered by first appearance
  int communities = 0;
  double score = 0.0;  // modularity Q, or map-equation codelength in bits
};

// Renumber labels in order of first appearance.
Membership canonical_labels(const Membership& labels);

// Directed modularity summed over i != j:
//   Q = (1/m) sum_{i != j} (Y_ij - kout_i kin_j / m) [c_i == c_j].
// Throws on a network without edges.
double directed_modularity(const Adjacency& network, const Membership& labels);

/// Agglomerative modularity maximisation from singletons: always apply the
/// merge with the largest gain (lexicographically smallest pair on ties), run
/// down to one community and return the best partition on the path.
CommunityResult greedy_modularity(const Adjacency& network);

// Communities visited by the greedy path, keyed by community count; used to
// compare the one-community end of the path against the bisection before it.
struct ModularityPath {
  std::vector<int> communities;  // after each merge, starting at n
  std::vector<double> modularity;
};
ModularityPath greedy_modularity_path(const Adjacency& network);

struct InfomapOptions {
  double teleportation = 0.15;
  double flow_tolerance = 1e-10;
  double move_threshold = 1e-12;
  int max_refinement_passes = 100;
  // Optional seeded Metropolis pass over single-node moves after refinement.
  bool anneal = false;
  int anneal_sweeps = 200;
  double anneal_start_temperature = 1e-2;
  double anneal_cooling = 0.97;
};

// Stationary visit rates of the teleporting random walk; dangling nodes
// teleport uniformly.
Vector visit_rates(const Adjacency& network, const InfomapOptions& options = {});

// Two-level map-equation codelength (bits) of a partition.
double map_equation(const Adjacency& network, const Membership& labels, const InfomapOptions& options = {});

/// Greedy pairwise merges from singletons while the codelength strictly
/// decreases, followed by single-node moves while any move improves it by more
/// than `move_threshold`.
CommunityResult infomap(const Adjacency& network, Rng& rng, const InfomapOptions& options = {});

}  // namespace sbmcv
