#include "sbmcv/kmeans.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace sbmcv {

namespace {

// Index of the nearest center; ties go to the smallest index.
int nearest(const Matrix& points, Eigen::Index row, const Matrix& centers, double& best_distance) {
  int best = 0;
  best_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (points.row(row) - centers.row(c)).squaredNorm();
    if (d < best_distance) {
      best_distance = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Matrix seed_plus_plus(const Matrix& points, int clusters, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(clusters, points.cols());
  std::vector<bool> chosen(n, false);
  Eigen::Index first = static_cast<Eigen::Index>(uniform_below(rng, n));
  centers.row(0) = points.row(first);
  chosen[first] = true;

  Vector dist2(n);
  for (Eigen::Index i = 0; i < n; ++i) dist2(i) = (points.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < clusters; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2(i);
        if (target < 0.0 && dist2(i) > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0)  // rounding at the tail
        for (Eigen::Index i = n - 1; i >= 0 && pick < 0; --i)
          if (dist2(i) > 0.0) pick = i;
    } else {
      // All remaining points coincide with a center; pick an unused one.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[i]) unused.push_back(i);
      pick = unused[uniform_below(rng, unused.size())];
    }
    chosen[pick] = true;
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      dist2(i) = std::min(dist2(i), (points.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Matrix& points, Matrix centers, int max_iterations) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  Membership labels(n, -1);
  Vector dist2(n);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = 0.0;
      const int c = nearest(points, i, centers, d);
      dist2(i) = d;
      if (c != labels[i]) {
        labels[i] = c;
        changed = true;
      }
    }

    std::vector<int> counts(k, 0);
    for (int l : labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Repair: move the worst-fit point (from a cluster with >1 member) here.
      Eigen::Index worst = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (counts[labels[i]] > 1 && (worst < 0 || dist2(i) > dist2(worst))) worst = i;
      --counts[labels[worst]];
      labels[worst] = c;
      counts[c] = 1;
      dist2(worst) = 0.0;
      changed = true;
    }

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= counts[c];

    if (!changed) break;
  }

  KMeansResult result;
  result.within_ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    result.within_ss += (points.row(i) - centers.row(labels[i])).squaredNorm();
  result.labels = std::move(labels);
  result.centers = std::move(centers);
  return result;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int clusters, Rng& rng, const KMeansOptions& options) {
  if (clusters < 1 || clusters > points.rows())
    throw std::invalid_argument("kmeans: need 1 <= clusters <= number of points");

  KMeansResult best;
  best.within_ss = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    KMeansResult candidate = lloyd(points, seed_plus_plus(points, clusters, rng), options.max_iterations);
    if (candidate.within_ss < best.within_ss) best = std::move(candidate);
  }

  // Renumber by first appearance.
  std::vector<int> remap(clusters, -1);
  int next = 0;
  for (int& l : best.labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  Matrix centers(clusters, points.cols());
  for (int c = 0; c < clusters; ++c) centers.row(remap[c]) = best.centers.row(c);
  best.centers = std::move(centers);
  return best;
}

}  // namespace sbmcv
