#pragma once

#include "sbmcv/rng.hpp"
#include "sbmcv/types.hpp"

namespace sbmcv {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 100;
};

struct KMeansResult {
  Membership labels;
  Matrix centers;  // clusters x dims
  double within_ss = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`.
///
/// Runs `restarts` independent seedings and keeps the lowest within-cluster
/// sum of squares (earliest restart wins ties). A cluster that empties during
/// an iteration is reseeded with the point farthest from its current center.
/// Labels are renumbered in order of first appearance. Requires clusters <= rows.
KMeansResult kmeans(const Matrix& points, int clusters, Rng& rng, const KMeansOptions& options = {});

}  // namespace sbmcv
