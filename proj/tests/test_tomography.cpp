#include <catch2/catch_amalgamated.hpp>

#include "csr/graph.hpp"
#include "csr/routing.hpp"
#include "csr/tomography.hpp"

#include <cmath>

using namespace csr;

namespace {

WsnGraph reference_graph() {
  WsnGraph g;
  g.n = 6;
  g.sink_id = 0;
  g.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}, {0, 3}};
  g.coords.assign(6, {0.0, 0.0});
  return g;
}

CollectionCycle reference_cycle() {
  CollectionCycle c;
  c.cycle_id = 1;
  c.paths = {{2, 1, 0}, {4, 3, 1, 0}, {5, 3, 0}};
  c.sources = {2, 4, 5};
  c.measurements.resize(3);
  c.measurements << 7.0, 13.0, 10.0;
  c.field.values.resize(5);
  c.field.values << 5.0, 2.0, 7.0, 1.0, 3.0;
  return c;
}

}  // namespace

TEST_CASE("path recovery keeps everything at probability one") {
  const CollectionCycle cyc = reference_cycle();
  const RecoveredPaths r = recover_paths(cyc, PathRecoveryModel{1.0}, 5);
  REQUIRE(r.paths == cyc.paths);
  REQUIRE(r.kept_indices == std::vector<int>{0, 1, 2});
}

TEST_CASE("path recovery drops everything at probability zero") {
  const CollectionCycle cyc = reference_cycle();
  const RecoveredPaths r = recover_paths(cyc, PathRecoveryModel{0.0}, 5);
  REQUIRE(r.paths.empty());
  REQUIRE(r.kept_indices.empty());
}

TEST_CASE("path recovery validates its probability") {
  const CollectionCycle cyc = reference_cycle();
  REQUIRE_THROWS_AS(recover_paths(cyc, PathRecoveryModel{-0.1}, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(recover_paths(cyc, PathRecoveryModel{1.1}, 5), std::invalid_argument);
}

TEST_CASE("recovered fraction at 0.9838 sits in the 3-sigma band") {
  // 10,000 packets, 100 per synthetic cycle.
  CollectionCycle cyc;
  cyc.paths.assign(100, {1, 0});
  cyc.measurements = Eigen::VectorXd::Zero(100);
  long kept = 0;
  for (int c = 0; c < 100; ++c)
    kept += static_cast<long>(recover_paths(cyc, PathRecoveryModel{0.9838}, 4000 + c).paths.size());
  const double frac = static_cast<double>(kept) / 10000.0;
  REQUIRE(frac >= 0.975);
  REQUIRE(frac <= 0.990);
}

TEST_CASE("reference paths produce the expected measurement matrix") {
  const WsnGraph g = reference_graph();
  const CollectionCycle cyc = reference_cycle();
  const MeasurementMatrix mm = build_measurement_matrix(cyc.paths, cyc.measurements, g);

  Eigen::MatrixXd expected(3, 5);
  expected << 1, 1, 0, 0, 0,
              1, 0, 1, 1, 0,
              0, 0, 1, 0, 1;
  REQUIRE(mm.rows.rows() == 3);
  REQUIRE(mm.rows.cols() == 5);
  REQUIRE((mm.rows - expected).norm() == 0.0);
  REQUIRE(mm.row_paths == cyc.paths);
  REQUIRE((mm.y_kept - cyc.measurements).norm() == 0.0);
}

TEST_CASE("a single two-node path yields one indicator row") {
  const WsnGraph g = reference_graph();
  Eigen::VectorXd y(1);
  y << 7.0;
  const MeasurementMatrix mm = build_measurement_matrix({{3, 0}}, y, g);
  Eigen::MatrixXd expected(1, 5);
  expected << 0, 0, 1, 0, 0;
  REQUIRE((mm.rows - expected).norm() == 0.0);
}

TEST_CASE("measurement matrix rejects malformed input") {
  const WsnGraph g = reference_graph();
  Eigen::VectorXd y(1);
  y << 1.0;
  REQUIRE_THROWS_WITH(build_measurement_matrix({{9, 0}}, y, g),
                      Catch::Matchers::ContainsSubstring("unknown node"));
  REQUIRE_THROWS_AS(build_measurement_matrix({{1, 0}, {3, 0}}, y, g), std::invalid_argument);
}

TEST_CASE("recovered system stays consistent over 500 random cycles") {
  const WsnGraph g = random_geometric_topology(30, 0.3, 41);
  const auto fields = synth_field_series(g, 50.0, 25.0, 0.3, 0.5, 500, 42);
  for (int c = 0; c < 500; ++c) {
    const RoutingState rs = build_cycle_routing(g, 0.1, 2, 1100 + c, c);
    const CollectionCycle cyc = collect_cycle(g, rs, fields[c], 6, 1300 + c);
    const RecoveredPaths rec = recover_paths(cyc, PathRecoveryModel{1.0}, 1500 + c);
    const MeasurementMatrix mm = build_measurement_matrix(cyc, rec, g);
    REQUIRE(mm.rows.rows() == 6);
    for (int i = 0; i < 6; ++i) {
      // Row support is exactly the path's sensor set.
      REQUIRE(mm.rows.row(i).sum() == static_cast<double>(mm.row_paths[i].size() - 1));
      // Phi x = y, re-summed in the contractual path order.
      double acc = 0.0;
      bool first = true;
      for (int node : mm.row_paths[i]) {
        if (node == g.sink_id) continue;
        if (first) {
          acc = fields[c].values[g.sensor_index(node)];
          first = false;
        } else {
          acc += fields[c].values[g.sensor_index(node)];
        }
      }
      REQUIRE(mm.y_kept[i] == acc);
      REQUIRE(mm.rows.row(i).dot(fields[c].values) ==
              Catch::Approx(mm.y_kept[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dropping packets removes matching rows and measurements") {
  const CollectionCycle cyc = reference_cycle();
  const WsnGraph g = reference_graph();
  RecoveredPaths rec;
  rec.paths = {cyc.paths[0], cyc.paths[2]};
  rec.kept_indices = {0, 2};
  const MeasurementMatrix mm = build_measurement_matrix(cyc, rec, g);
  REQUIRE(mm.rows.rows() == 2);
  REQUIRE(mm.y_kept[0] == 7.0);
  REQUIRE(mm.y_kept[1] == 10.0);
}

TEST_CASE("routing topology graph of the reference cycle") {
  const WsnGraph g = reference_graph();
  const SimpleGraph t = urtg_from_paths(reference_cycle().paths, g);
  REQUIRE(t.n == 5);
  // Sensor indices: node k maps to k-1 here.
  const std::vector<Edge> expected{{0, 1}, {0, 2}, {2, 3}, {2, 4}};
  REQUIRE(t.edges == expected);
}

TEST_CASE("one-hop paths contribute no topology edges") {
  const WsnGraph g = reference_graph();
  const SimpleGraph t = urtg_from_paths({{1, 0}}, g);
  REQUIRE(t.edges.empty());
}

TEST_CASE("multi-cycle topology equals the union of per-cycle graphs") {
  const WsnGraph g = random_geometric_topology(25, 0.35, 51);
  const auto fields = synth_field_series(g, 50.0, 25.0, 0.3, 0.5, 10, 52);
  std::vector<CollectionCycle> cycles;
  std::vector<SimpleGraph> per_cycle;
  for (int c = 0; c < 10; ++c) {
    const RoutingState rs = build_cycle_routing(g, 0.1, 2, 2100 + c, c);
    cycles.push_back(collect_cycle(g, rs, fields[c], 5, 2300 + c));
    per_cycle.push_back(urtg_from_paths(cycles.back().paths, g));
  }
  REQUIRE(urtg(cycles, g) == union_graph(per_cycle));
  REQUIRE_THROWS_AS(urtg({}, g), std::invalid_argument);
}
