#include "sbmcv/community.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sbmcv {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_network(const Adjacency& network) {
  if (network.values().sum() <= 0.0) throw std::invalid_argument("infomap: network has no edges");
}

// F(a, b): stationary flow along a -> b, teleportation included. Rows sum to
// the visit rate of the source node.
Matrix node_flow(const Adjacency& network, const Vector& rates, double teleportation) {
  const int n = network.nodes();
  const Vector out_degree = network.values().rowwise().sum();
  Matrix flow(n, n);
  for (int a = 0; a < n; ++a) {
    if (out_degree(a) > 0.0) {
      flow.row(a) = rates(a) * ((1.0 - teleportation) * network.values().row(a) / out_degree(a));
      flow.row(a).array() += rates(a) * teleportation / n;
    } else {
      flow.row(a).setConstant(rates(a) / n);
    }
  }
  return flow;
}

struct Modules {
  std::vector<double> exit;
  std::vector<double> visit;
};

Modules module_flows(const Matrix& flow, const Vector& rates, const Membership& c, int k) {
  Modules m{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  const int n = static_cast<int>(c.size());
  for (int a = 0; a < n; ++a) {
    m.visit[c[a]] += rates(a);
    for (int b = 0; b < n; ++b)
      if (c[a] != c[b]) m.exit[c[a]] += flow(a, b);
  }
  return m;
}

// Codelength from module totals; `node_entropy` is sum plogp(p_a).
double codelength(const Modules& m, double node_entropy) {
  double exit_total = 0.0, exit_terms = 0.0, module_terms = 0.0;
  for (std::size_t i = 0; i < m.exit.size(); ++i) {
    exit_total += m.exit[i];
    exit_terms += plogp(m.exit[i]);
    module_terms += plogp(m.exit[i] + m.visit[i]);
  }
  return plogp(exit_total) - 2.0 * exit_terms - node_entropy + module_terms;
}

double node_entropy(const Vector& rates) {
  double h = 0.0;
  for (Eigen::Index a = 0; a < rates.size(); ++a) h += plogp(rates(a));
  return h;
}

// Move-aware state for refinement and annealing.
struct Partition {
  Membership labels;
  std::vector<double> exit;
  std::vector<double> visit;
  double exit_total = 0.0;
};

// Module ids are 0..k-1; modules emptied by moves stay in place.
Partition make_partition(const Matrix& flow, const Vector& rates, const Membership& labels, int k) {
  Modules m = module_flows(flow, rates, labels, k);
  Partition p{labels, std::move(m.exit), std::move(m.visit), 0.0};
  for (double q : p.exit) p.exit_total += q;
  return p;
}

struct Move {
  double delta;  // change in codelength
  double exit_from, exit_to;
};

// Codelength change when node a leaves its module for module `to`.
Move evaluate_move(const Partition& p, const Matrix& flow, const Vector& rates, int a, int to,
                   const std::vector<double>& out_to_module, const std::vector<double>& in_from_module) {
  const int from = p.labels[a];
  const double leaving = rates(a) - flow(a, a);
  const double exit_from = p.exit[from] - (leaving - out_to_module[from]) + in_from_module[from];
  const double exit_to = p.exit[to] + (leaving - out_to_module[to]) - in_from_module[to];
  const double visit_from = p.visit[from] - rates(a);
  const double visit_to = p.visit[to] + rates(a);
  const double total = p.exit_total - p.exit[from] - p.exit[to] + exit_from + exit_to;

  double delta = plogp(total) - plogp(p.exit_total);
  delta -= 2.0 * (plogp(exit_from) + plogp(exit_to) - plogp(p.exit[from]) - plogp(p.exit[to]));
  delta += plogp(exit_from + visit_from) + plogp(exit_to + visit_to) - plogp(p.exit[from] + p.visit[from]) -
           plogp(p.exit[to] + p.visit[to]);
  return {delta, exit_from, exit_to};
}

void module_links(const Partition& p, const Matrix& flow, int a, std::vector<double>& out_to,
                  std::vector<double>& in_from) {
  std::fill(out_to.begin(), out_to.end(), 0.0);
  std::fill(in_from.begin(), in_from.end(), 0.0);
  for (std::size_t b = 0; b < p.labels.size(); ++b) {
    if (static_cast<int>(b) == a) continue;
    out_to[p.labels[b]] += flow(a, b);
    in_from[p.labels[b]] += flow(b, a);
  }
}

void apply_move(Partition& p, const Vector& rates, int a, int to, const Move& move) {
  const int from = p.labels[a];
  p.exit_total += move.exit_from + move.exit_to - p.exit[from] - p.exit[to];
  p.exit[from] = move.exit_from;
  p.exit[to] = move.exit_to;
  p.visit[from] -= rates(a);
  p.visit[to] += rates(a);
  p.labels[a] = to;
}

}  // namespace

Vector visit_rates(const Adjacency& network, const InfomapOptions& options) {
  const int n = network.nodes();
  const Vector out_degree = network.values().rowwise().sum();
  Vector rates = Vector::Constant(n, 1.0 / n);
  const double tau = options.teleportation;
  for (int iteration = 0; iteration < 100000; ++iteration) {
    double teleport = 0.0;
    Vector next = Vector::Zero(n);
    for (int a = 0; a < n; ++a) {
      if (out_degree(a) > 0.0) {
        next += (1.0 - tau) * rates(a) / out_degree(a) * network.values().row(a).transpose();
        teleport += tau * rates(a);
      } else {
        teleport += rates(a);
      }
    }
    next.array() += teleport / n;
    next /= next.sum();
    const double change = (next - rates).cwiseAbs().sum();
    rates = next;
    if (change < options.flow_tolerance) break;
  }
  return rates;
}

double map_equation(const Adjacency& network, const Membership& labels, const InfomapOptions& options) {
  if (static_cast<int>(labels.size()) != network.nodes()) throw std::invalid_argument("map_equation: label length mismatch");
  check_network(network);
  const Vector rates = visit_rates(network, options);
  const Matrix flow = node_flow(network, rates, options.teleportation);
  const Membership c = canonical_labels(labels);
  return codelength(module_flows(flow, rates, c, label_count(c)), node_entropy(rates));
}

CommunityResult infomap(const Adjacency& network, Rng& rng, const InfomapOptions& options) {
  check_network(network);
  const int n = network.nodes();
  const Vector rates = visit_rates(network, options);
  const Matrix flow = node_flow(network, rates, options.teleportation);

  // Greedy merges on the module flow matrix, starting from singletons.
  Matrix between = flow;
  std::vector<double> exit(n), visit(n);
  double exit_total = 0.0;
  for (int a = 0; a < n; ++a) {
    visit[a] = rates(a);
    exit[a] = rates(a) - flow(a, a);
    exit_total += exit[a];
  }
  std::vector<bool> active(n, true);
  Membership labels(n);
  for (int a = 0; a < n; ++a) labels[a] = a;

  for (;;) {
    int best_a = -1, best_b = -1;
    double best_delta = 0.0;
    for (int a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double internal = between(a, b) + between(b, a);
        const double merged_exit = exit[a] + exit[b] - internal;
        const double merged_visit = visit[a] + visit[b];
        double delta = plogp(exit_total - internal) - plogp(exit_total);
        delta -= 2.0 * (plogp(merged_exit) - plogp(exit[a]) - plogp(exit[b]));
        delta += plogp(merged_exit + merged_visit) - plogp(exit[a] + visit[a]) - plogp(exit[b] + visit[b]);
        if (delta < best_delta) {
          best_delta = delta;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0 || -best_delta <= options.move_threshold) break;
    const double internal = between(best_a, best_b) + between(best_b, best_a);
    exit_total -= internal;
    exit[best_a] += exit[best_b] - internal;
    visit[best_a] += visit[best_b];
    between.row(best_a) += between.row(best_b);
    between.col(best_a) += between.col(best_b);
    active[best_b] = false;
    for (int& l : labels)
      if (l == best_b) l = best_a;
  }

  // Single-node moves between existing modules.
  const Membership merged = canonical_labels(labels);
  const int k = label_count(merged);
  Partition p = make_partition(flow, rates, merged, k);
  std::vector<double> out_to(k), in_from(k);
  for (int pass = 0; pass < options.max_refinement_passes; ++pass) {
    bool moved = false;
    for (int a = 0; a < n; ++a) {
      module_links(p, flow, a, out_to, in_from);
      int best_to = -1;
      Move best{0.0, 0.0, 0.0};
      for (int to = 0; to < k; ++to) {
        if (to == p.labels[a]) continue;
        const Move move = evaluate_move(p, flow, rates, a, to, out_to, in_from);
        if (move.delta < best.delta) {
          best = move;
          best_to = to;
        }
      }
      if (best_to >= 0 && -best.delta > options.move_threshold) {
        apply_move(p, rates, a, best_to, best);
        moved = true;
      }
    }
    // Resynchronise accumulated sums.
    p = make_partition(flow, rates, p.labels, k);
    if (!moved) break;
  }

  if (options.anneal && k > 1) {
    const double entropy = node_entropy(rates);
    Membership best_labels = p.labels;
    double current = codelength({p.exit, p.visit}, entropy);
    double best_length = current;
    double temperature = options.anneal_start_temperature;
    for (int sweep = 0; sweep < options.anneal_sweeps; ++sweep) {
      for (int step = 0; step < n; ++step) {
        const int a = static_cast<int>(uniform_below(rng, n));
        int to = static_cast<int>(uniform_below(rng, k - 1));
        if (to >= p.labels[a]) ++to;
        module_links(p, flow, a, out_to, in_from);
        const Move move = evaluate_move(p, flow, rates, a, to, out_to, in_from);
        if (move.delta <= 0.0 || uniform01(rng) < std::exp(-move.delta / temperature)) {
          apply_move(p, rates, a, to, move);
          current += move.delta;
          if (current < best_length - options.move_threshold) {
            best_length = current;
            best_labels = p.labels;
          }
        }
      }
      temperature *= options.anneal_cooling;
    }
    p = make_partition(flow, rates, best_labels, k);
  }

  CommunityResult result;
  result.labels = canonical_labels(p.labels);
  result.communities = label_count(result.labels);
  result.score = codelength(module_flows(flow, rates, result.labels, result.communities), node_entropy(rates));
  return result;
}

}  // namespace sbmcv
