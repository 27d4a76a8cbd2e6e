#include "sbmcv/community.hpp"

#include <stdexcept>
#include <vector>

namespace sbmcv {

Membership canonical_labels(const Membership& labels) {
  Membership out(labels.size());
  std::vector<std::pair<int, int>> seen;  // (original, renumbered)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int id = -1;
    for (const auto& [original, renumbered] : seen)
      if (original == labels[i]) id = renumbered;
    if (id < 0) {
      id = static_cast<int>(seen.size());
      seen.emplace_back(labels[i], id);
    }
    out[i] = id;
  }
  return out;
}

double directed_modularity(const Adjacency& network, const Membership& labels) {
  const int n = network.nodes();
  if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("modularity: label length mismatch");
  const double m = network.values().sum();
  if (m <= 0.0) throw std::invalid_argument("modularity: network has no edges");

  const Membership c = canonical_labels(labels);
  const int k = label_count(c);
  const Vector out_degree = network.values().rowwise().sum();
  const Vector in_degree = network.values().colwise().sum().transpose();
  std::vector<double> within(k, 0.0), out_total(k, 0.0), in_total(k, 0.0);
  double self_pairs = 0.0;
  for (int i = 0; i < n; ++i) {
    out_total[c[i]] += out_degree(i);
    in_total[c[i]] += in_degree(i);
    self_pairs += out_degree(i) * in_degree(i);
    for (int j = 0; j < n; ++j)
      if (c[i] == c[j]) within[c[i]] += network.values()(i, j);
  }
  double edges = 0.0, expected = 0.0;
  for (int g = 0; g < k; ++g) {
    edges += within[g];
    expected += out_total[g] * in_total[g];
  }
  // Drop the i == j terms from the expectation.
  expected -= self_pairs;
  return (edges - expected / m) / m;
}

namespace {

struct MergeStep {
  int keep;
  int absorb;
  double modularity;
};

std::vector<MergeStep> merge_sequence(const Adjacency& network) {
  const int n = network.nodes();
  const double m = network.values().sum();
  if (m <= 0.0) throw std::invalid_argument("greedy_modularity: network has no edges");

  Matrix between = network.values();  // edges from community a to b
  Vector out = between.rowwise().sum();
  Vector in = between.colwise().sum().transpose();
  std::vector<bool> active(n, true);

  std::vector<MergeStep> steps;
  double q = 0.0;  // singletons: no i != j pair shares a community
  for (int remaining = n; remaining > 1; --remaining) {
    int best_a = -1, best_b = -1;
    double best_gain = 0.0;
    for (int a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double gain = (between(a, b) + between(b, a) - (out(a) * in(b) + out(b) * in(a)) / m) / m;
        if (best_a < 0 || gain > best_gain) {
          best_gain = gain;
          best_a = a;
          best_b = b;
        }
      }
    }
    between.row(best_a) += between.row(best_b);
    between.col(best_a) += between.col(best_b);
    out(best_a) += out(best_b);
    in(best_a) += in(best_b);
    active[best_b] = false;
    q += best_gain;
    steps.push_back({best_a, best_b, q});
  }
  return steps;
}

Membership replay(int n, const std::vector<MergeStep>& steps, std::size_t count) {
  Membership labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i;
  for (std::size_t s = 0; s < count; ++s)
    for (int& l : labels)
      if (l == steps[s].absorb) l = steps[s].keep;
  return canonical_labels(labels);
}

}  // namespace

ModularityPath greedy_modularity_path(const Adjacency& network) {
  const auto steps = merge_sequence(network);
  ModularityPath path;
  path.communities.push_back(network.nodes());
  path.modularity.push_back(0.0);
  int count = network.nodes();
  for (const auto& step : steps) {
    path.communities.push_back(--count);
    path.modularity.push_back(step.modularity);
  }
  return path;
}

CommunityResult greedy_modularity(const Adjacency& network) {
  const auto steps = merge_sequence(network);
  std::size_t best = 0;  // number of merges applied
  double best_q = 0.0;
  for (std::size_t s = 0; s < steps.size(); ++s)
    if (steps[s].modularity > best_q) {
      best_q = steps[s].modularity;
      best = s + 1;
    }
  CommunityResult result;
  result.labels = replay(network.nodes(), steps, best);
  result.communities = label_count(result.labels);
  result.score = directed_modularity(network, result.labels);
  return result;
}

}  // namespace sbmcv
