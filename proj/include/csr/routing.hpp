#pragma once

#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csr/graph.hpp"
#include "csr/rng.hpp"

namespace csr {

// Per-cycle routing DAG: surviving links, hop cost toward the sink and the
// candidate-parent lists used by the randomized forwarding walk.
struct RoutingState {
  int cycle_id = 0;
  std::vector<Edge> alive_edges;
  std::vector<double> cost_to_sink;                // per node, hops; sink = 0
  std::vector<std::vector<int>> parent_candidates; // per node, ordered by (cost, id)
};

struct CollectionCycle {
  int cycle_id = 0;
  std::vector<std::vector<int>> paths;  // each [source, ..., sink]
  std::vector<int> sources;
  Eigen::VectorXd measurements;
  SensorField field;
};

enum class Scheme { kCsr, kCdg, kPathRecording };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kCsr: return "CSR";
    case Scheme::kCdg: return "CDG";
    case Scheme::kPathRecording: return "PATH_RECORDING";
  }
  return "?";
}

struct TransmissionReport {
  Scheme scheme = Scheme::kCsr;
  long transmissions = 0;
  long overhead_bytes = 0;
  int max_hops = 0;
};

inline RoutingState build_cycle_routing(const WsnGraph& graph, double link_failure_prob,
                                        int rand_pool, std::uint64_t seed, int cycle_id = 0,
                                        int redraw_cap = 100) {
  if (link_failure_prob < 0.0 || link_failure_prob >= 1.0)
    throw std::invalid_argument("build_cycle_routing: link_failure_prob must be in [0, 1)");
  if (rand_pool < 1) throw std::invalid_argument("build_cycle_routing: rand_pool must be >= 1");

  const double inf = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < redraw_cap; ++attempt) {
    Rng rng(mix_seed(seed + static_cast<std::uint64_t>(attempt), 0x726f757465ULL));
    std::vector<Edge> alive;
    for (const auto& e : graph.edges)
      if (!rng.bernoulli(link_failure_prob)) alive.push_back(e);

    std::vector<std::vector<int>> adj(graph.n);
    for (const auto& [u, v] : alive) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }

    std::vector<double> cost(graph.n, inf);
    cost[graph.sink_id] = 0.0;
    std::queue<int> q;
    q.push(graph.sink_id);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (cost[v] == inf) {
          cost[v] = cost[u] + 1.0;
          q.push(v);
        }
      }
    }

    std::vector<std::vector<int>> candidates(graph.n);
    bool stranded = false;
    for (int u = 0; u < graph.n && !stranded; ++u) {
      if (u == graph.sink_id) continue;
      if (cost[u] == inf) {
        stranded = true;
        break;
      }
      std::vector<int> lower;
      for (int v : adj[u])
        if (cost[v] < cost[u]) lower.push_back(v);
      std::sort(lower.begin(), lower.end(),
                [&](int a, int b) { return cost[a] != cost[b] ? cost[a] < cost[b] : a < b; });
      if (lower.empty()) {
        stranded = true;
        break;
      }
      if (static_cast<int>(lower.size()) > rand_pool) lower.resize(rand_pool);
      candidates[u] = std::move(lower);
    }
    if (stranded) continue;
    return RoutingState{cycle_id, std::move(alive), std::move(cost), std::move(candidates)};
  }
  throw std::runtime_error("partitioned network after " + std::to_string(redraw_cap) +
                           " redraws");
}

inline CollectionCycle collect_cycle(const WsnGraph& graph, const RoutingState& routing,
                                     const SensorField& field, int M, std::uint64_t seed) {
  const int N = graph.sensor_count();
  if (M < 1 || M > N) throw std::invalid_argument("too many sources");
  if (field.values.size() != N)
    throw std::invalid_argument("collect_cycle: field length mismatch");

  Rng rng(mix_seed(seed, 0x636f6c6cULL));
  const std::vector<int> src_idx = rng.sample_without_replacement(N, M);

  CollectionCycle cycle;
  cycle.cycle_id = routing.cycle_id;
  cycle.field = field;
  cycle.measurements.resize(M);
  for (int i = 0; i < M; ++i) {
    const int source = graph.node_of_sensor(src_idx[i]);
    cycle.sources.push_back(source);
    std::vector<int> path{source};
    // Accumulation order is fixed source-to-sink; this float summation
    // order is part of the contract.
    double y = field.values[src_idx[i]];
    int u = source;
    while (u != graph.sink_id) {
      const auto& cands = routing.parent_candidates[u];
      const int next = cands[rng.uniform_int(0, static_cast<int>(cands.size()) - 1)];
      path.push_back(next);
      if (next != graph.sink_id) y += field.values[graph.sensor_index(next)];
      u = next;
    }
    cycle.paths.push_back(std::move(path));
    cycle.measurements[i] = y;
  }
  return cycle;
}

inline TransmissionReport transmission_stats(const CollectionCycle& cycle, Scheme scheme,
                                             int sensor_count) {
  TransmissionReport rep;
  rep.scheme = scheme;
  const long M = static_cast<long>(cycle.paths.size());
  long hop_sum = 0;
  for (const auto& p : cycle.paths) {
    const int hops = static_cast<int>(p.size()) - 1;
    hop_sum += hops;
    rep.max_hops = std::max(rep.max_hops, hops);
  }
  switch (scheme) {
    case Scheme::kCsr:
      rep.transmissions = hop_sum;
      rep.overhead_bytes = 4 * M;
      break;
    case Scheme::kPathRecording:
      rep.transmissions = hop_sum;
      rep.overhead_bytes = 0;
      for (const auto& p : cycle.paths)
        rep.overhead_bytes += 2 * (static_cast<long>(p.size()) - 1 - 1);
      break;
    case Scheme::kCdg:
      rep.transmissions = static_cast<long>(sensor_count) * M;
      rep.overhead_bytes = 0;
      break;
  }
  return rep;
}

}  // namespace csr
