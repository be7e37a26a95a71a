#pragma once

#include <algorithm>
#include <array>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "csr/rng.hpp"

namespace csr {

using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) {
  return u < v ? Edge{u, v} : Edge{v, u};
}

// Simple undirected graph on vertices 0..n-1. Edges are stored normalized
// (u < v), sorted and deduplicated.
struct SimpleGraph {
  int n = 0;
  std::vector<Edge> edges;

  void normalize() {
    for (auto& e : edges) e = make_edge(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& [u, v] : edges) {
      if (u == v) throw std::invalid_argument("self-loop in graph");
      if (u < 0 || v >= n) throw std::invalid_argument("edge endpoint out of range");
    }
  }

  std::vector<std::vector<int>> adjacency_list() const {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  bool connected() const {
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    auto adj = adjacency_list();
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          q.push(v);
        }
      }
    }
    return count == n;
  }

  bool operator==(const SimpleGraph&) const = default;
};

// WSN deployment topology: sink + sensor nodes with planar coordinates in
// the unit square. Undirected connectivity only; per-cycle direction comes
// from the routing layer.
struct WsnGraph {
  int n = 0;
  int sink_id = 0;
  std::vector<Edge> edges;
  std::vector<std::array<double, 2>> coords;

  int sensor_count() const { return n - 1; }

  // Sensor nodes are indexed 0..N-1 by skipping the sink.
  int sensor_index(int node) const {
    if (node < 0 || node >= n || node == sink_id)
      throw std::invalid_argument("unknown node: " + std::to_string(node));
    return node < sink_id ? node : node - 1;
  }

  int node_of_sensor(int idx) const {
    if (idx < 0 || idx >= sensor_count())
      throw std::invalid_argument("sensor index out of range");
    return idx < sink_id ? idx : idx + 1;
  }

  std::vector<std::vector<int>> adjacency_list() const {
    SimpleGraph g{n, edges};
    return g.adjacency_list();
  }

  bool operator==(const WsnGraph&) const = default;
};

struct SensorField {
  int cycle_id = 0;
  Eigen::VectorXd values;  // length N = n-1, sensor-index order
};

struct GraphMatrices {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd degree;
  Eigen::MatrixXd laplacian;
};

inline WsnGraph random_geometric_topology(int n, double radius, std::uint64_t seed,
                                          int retry_cap = 100) {
  if (n < 2) throw std::invalid_argument("random_geometric_topology: n must be >= 2");
  if (!(radius > 0.0) || radius > std::sqrt(2.0) + 1e-12)
    throw std::invalid_argument("random_geometric_topology: radius out of range");

  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<std::array<double, 2>> coords(n);
    for (auto& c : coords) {
      c[0] = rng.uniform();
      c[1] = rng.uniform();
    }
    std::vector<Edge> edges;
    const double r2 = radius * radius;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const double dx = coords[u][0] - coords[v][0];
        const double dy = coords[u][1] - coords[v][1];
        if (dx * dx + dy * dy <= r2) edges.emplace_back(u, v);
      }
    }
    SimpleGraph g{n, edges};
    if (!g.connected()) continue;

    int sink = 0;
    double best = coords[0][0] * coords[0][0] + coords[0][1] * coords[0][1];
    for (int u = 1; u < n; ++u) {
      const double d = coords[u][0] * coords[u][0] + coords[u][1] * coords[u][1];
      if (d < best) {
        best = d;
        sink = u;
      }
    }
    return WsnGraph{n, sink, std::move(edges), std::move(coords)};
  }
  throw std::runtime_error("disconnected topology after " + std::to_string(retry_cap) +
                           " attempts");
}

// Gaussian-process fields over sensor coordinates with squared-exponential
// covariance and stationary AR(1) temporal evolution.
inline std::vector<SensorField> synth_field_series(const WsnGraph& graph, double mean,
                                                   double variance, double length_scale,
                                                   double ar_coeff, int cycles,
                                                   std::uint64_t seed) {
  if (!(variance > 0.0)) throw std::invalid_argument("synth_field_series: variance must be > 0");
  if (!(length_scale > 0.0))
    throw std::invalid_argument("synth_field_series: length_scale must be > 0");
  if (ar_coeff < 0.0 || ar_coeff >= 1.0)
    throw std::invalid_argument("synth_field_series: ar_coeff must be in [0, 1)");
  if (cycles < 1) throw std::invalid_argument("synth_field_series: cycles must be >= 1");

  const int N = graph.sensor_count();
  Eigen::MatrixXd cov(N, N);
  for (int i = 0; i < N; ++i) {
    const auto& ci = graph.coords[graph.node_of_sensor(i)];
    for (int j = 0; j < N; ++j) {
      const auto& cj = graph.coords[graph.node_of_sensor(j)];
      const double dx = ci[0] - cj[0];
      const double dy = ci[1] - cj[1];
      cov(i, j) = variance * std::exp(-(dx * dx + dy * dy) / (2.0 * length_scale * length_scale));
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 1e-12 * variance;
  bool ok = false;
  for (int tries = 0; tries < 8; ++tries, jitter *= 100.0) {
    Eigen::MatrixXd shifted = cov + jitter * Eigen::MatrixXd::Identity(N, N);
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw std::runtime_error("degenerate covariance");
  const Eigen::MatrixXd chol = llt.matrixL();

  Rng rng(mix_seed(seed, 0x6669656c64ULL));
  auto gp_deviation = [&]() {
    Eigen::VectorXd z(N);
    for (int i = 0; i < N; ++i) z[i] = rng.normal();
    return Eigen::VectorXd(chol * z);
  };

  std::vector<SensorField> out;
  out.reserve(cycles);
  Eigen::VectorXd dev = gp_deviation();
  out.push_back({1, Eigen::VectorXd::Constant(N, mean) + dev});
  const double innov = std::sqrt(1.0 - ar_coeff * ar_coeff);
  for (int c = 2; c <= cycles; ++c) {
    dev = ar_coeff * dev + innov * gp_deviation();
    out.push_back({c, Eigen::VectorXd::Constant(N, mean) + dev});
  }
  return out;
}

inline SimpleGraph union_graph(const std::vector<SimpleGraph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("union_graph: empty input");
  const int n = graphs.front().n;
  SimpleGraph out{n, {}};
  for (const auto& g : graphs) {
    if (g.n != n) throw std::invalid_argument("vertex set mismatch");
    out.edges.insert(out.edges.end(), g.edges.begin(), g.edges.end());
  }
  out.normalize();
  return out;
}

inline SimpleGraph complement_graph(const SimpleGraph& g) {
  std::set<Edge> present(g.edges.begin(), g.edges.end());
  SimpleGraph out{g.n, {}};
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v)
      if (!present.count({u, v})) out.edges.emplace_back(u, v);
  return out;
}

inline GraphMatrices graph_matrices(const SimpleGraph& g) {
  GraphMatrices m;
  m.adjacency = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& [u, v] : g.edges) {
    m.adjacency(u, v) = 1.0;
    m.adjacency(v, u) = 1.0;
  }
  m.degree = Eigen::MatrixXd(m.adjacency.rowwise().sum().asDiagonal());
  m.laplacian = m.degree - m.adjacency;
  return m;
}

}  // namespace csr
