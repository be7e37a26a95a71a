#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csr/graph.hpp"
#include "csr/rng.hpp"
#include "csr/routing.hpp"

namespace csr {

// Stochastic stand-in for sink-side per-packet path reconstruction: each
// packet's path is recovered exactly with an independent success
// probability; failures drop the packet's measurement.
struct PathRecoveryModel {
  double recovery_prob = 1.0;
};

struct MeasurementMatrix {
  Eigen::MatrixXd rows;                      // M' x N, 0/1 entries
  std::vector<std::vector<int>> row_paths;   // recovered path per row
  Eigen::VectorXd y_kept;                    // aligned with rows
};

struct RecoveredPaths {
  std::vector<std::vector<int>> paths;
  std::vector<int> kept_indices;  // packet indices into the cycle, arrival order
};

inline RecoveredPaths recover_paths(const CollectionCycle& cycle, const PathRecoveryModel& model,
                                    std::uint64_t seed) {
  if (model.recovery_prob < 0.0 || model.recovery_prob > 1.0)
    throw std::invalid_argument("recover_paths: recovery_prob must be in [0, 1]");
  Rng rng(mix_seed(seed, 0x72747254ULL));
  RecoveredPaths out;
  for (int i = 0; i < static_cast<int>(cycle.paths.size()); ++i) {
    if (rng.bernoulli(model.recovery_prob)) {
      out.paths.push_back(cycle.paths[i]);
      out.kept_indices.push_back(i);
    }
  }
  return out;
}

inline MeasurementMatrix build_measurement_matrix(const std::vector<std::vector<int>>& paths,
                                                  const Eigen::VectorXd& y,
                                                  const WsnGraph& graph) {
  const int N = graph.sensor_count();
  const int M = static_cast<int>(paths.size());
  if (y.size() != M)
    throw std::invalid_argument("build_measurement_matrix: y/path count mismatch");

  MeasurementMatrix mm;
  mm.rows = Eigen::MatrixXd::Zero(M, N);
  mm.row_paths = paths;
  mm.y_kept = y;
  for (int i = 0; i < M; ++i) {
    for (int node : paths[i]) {
      if (node == graph.sink_id) continue;
      if (node < 0 || node >= graph.n)
        throw std::invalid_argument("unknown node: " + std::to_string(node));
      mm.rows(i, graph.sensor_index(node)) = 1.0;
    }
  }
  return mm;
}

inline MeasurementMatrix build_measurement_matrix(const CollectionCycle& cycle,
                                                  const RecoveredPaths& recovered,
                                                  const WsnGraph& graph) {
  Eigen::VectorXd y(recovered.kept_indices.size());
  for (int i = 0; i < static_cast<int>(recovered.kept_indices.size()); ++i)
    y[i] = cycle.measurements[recovered.kept_indices[i]];
  return build_measurement_matrix(recovered.paths, y, graph);
}

// Undirected routing topology graph over sensor indices: an edge per
// consecutive sensor-sensor hop seen on any of the given paths. Sink hops
// are dropped (the basis lives on sensor nodes only).
inline SimpleGraph urtg_from_paths(const std::vector<std::vector<int>>& paths,
                                   const WsnGraph& graph) {
  SimpleGraph g{graph.sensor_count(), {}};
  for (const auto& p : paths) {
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      if (p[j] == graph.sink_id || p[j + 1] == graph.sink_id) continue;
      g.edges.push_back(make_edge(graph.sensor_index(p[j]), graph.sensor_index(p[j + 1])));
    }
  }
  g.normalize();
  return g;
}

inline SimpleGraph urtg(const std::vector<CollectionCycle>& cycles, const WsnGraph& graph) {
  if (cycles.empty()) throw std::invalid_argument("urtg: empty cycle list");
  std::vector<SimpleGraph> per_cycle;
  per_cycle.reserve(cycles.size());
  for (const auto& c : cycles) per_cycle.push_back(urtg_from_paths(c.paths, graph));
  return union_graph(per_cycle);
}

}  // namespace csr
