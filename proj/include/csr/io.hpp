#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "csr/basis.hpp"
#include "csr/graph.hpp"
#include "csr/lifting.hpp"
#include "csr/routing.hpp"

namespace csr {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

inline json to_json(const WsnGraph& g) {
  json j;
  j["n"] = g.n;
  j["sink_id"] = g.sink_id;
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  j["edges"] = edges;
  json coords = json::array();
  for (const auto& c : g.coords) coords.push_back({c[0], c[1]});
  j["coords"] = coords;
  return j;
}

inline WsnGraph wsn_graph_from_json(const json& j) {
  WsnGraph g;
  g.n = j.at("n").get<int>();
  g.sink_id = j.at("sink_id").get<int>();
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  for (const auto& c : j.at("coords"))
    g.coords.push_back({c[0].get<double>(), c[1].get<double>()});
  return g;
}

inline json to_json(const std::vector<SensorField>& fields) {
  json arr = json::array();
  for (const auto& f : fields)
    arr.push_back({{"cycle_id", f.cycle_id}, {"values", vector_to_json(f.values)}});
  return arr;
}

inline std::vector<SensorField> fields_from_json(const json& arr) {
  std::vector<SensorField> out;
  for (const auto& j : arr)
    out.push_back({j.at("cycle_id").get<int>(), vector_from_json(j.at("values"))});
  return out;
}

inline json to_json(const CollectionCycle& c) {
  json j;
  j["cycle_id"] = c.cycle_id;
  j["paths"] = c.paths;
  j["sources"] = c.sources;
  j["measurements"] = vector_to_json(c.measurements);
  j["field"] = {{"cycle_id", c.field.cycle_id}, {"values", vector_to_json(c.field.values)}};
  return j;
}

inline CollectionCycle cycle_from_json(const json& j) {
  CollectionCycle c;
  c.cycle_id = j.at("cycle_id").get<int>();
  c.paths = j.at("paths").get<std::vector<std::vector<int>>>();
  c.sources = j.at("sources").get<std::vector<int>>();
  c.measurements = vector_from_json(j.at("measurements"));
  c.field.cycle_id = j.at("field").at("cycle_id").get<int>();
  c.field.values = vector_from_json(j.at("field").at("values"));
  return c;
}

// The partition is reconstructed from its size; only the operators and the
// embedding need storing.
inline json to_json(const LiftedWavelets& w, const Embedding& embedding) {
  json j;
  j["n"] = w.partition.n;
  json ups = json::array(), preds = json::array();
  for (const auto& m : w.update_ops) ups.push_back(matrix_to_json(m));
  for (const auto& m : w.predict_ops) preds.push_back(matrix_to_json(m));
  j["update_ops"] = ups;
  j["predict_ops"] = preds;
  j["order"] = embedding.order;
  j["walk"] = embedding.walk;
  return j;
}

inline std::pair<LiftedWavelets, Embedding> wavelets_from_json(const json& j) {
  LiftedWavelets w;
  w.partition = dyadic_partition(j.at("n").get<int>());
  for (const auto& m : j.at("update_ops")) w.update_ops.push_back(matrix_from_json(m));
  for (const auto& m : j.at("predict_ops")) w.predict_ops.push_back(matrix_from_json(m));
  w.check_shapes();
  Embedding emb;
  emb.order = j.at("order").get<std::vector<int>>();
  emb.walk = j.at("walk").get<std::vector<int>>();
  return {w, emb};
}

inline void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

}  // namespace csr
