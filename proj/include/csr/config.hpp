#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csr/solvers.hpp"

namespace csr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full experiment configuration, sectioned per module. Defaults mirror the
// testbed scale: 75 sensor nodes, 87 cycles, 10 training cycles, M = 12.
struct ExperimentConfig {
  // topology
  int n_sensors = 75;
  double radius = 0.18;

  // field
  double field_mean = 50.0;
  double field_variance = 25.0;
  double length_scale = 0.3;
  double ar_coeff = 0.5;

  // routing
  double link_failure_prob = 0.1;
  int rand_pool = 2;

  // tomography
  double recovery_prob = 0.9838;

  // basis training
  double train_epsilon = 25.0;
  double train_step = 0.1;
  int train_iters = 2000;
  bool normalized_similarity = false;

  // solvers
  Sl0Params sl0;
  double l1_tol = 1e-9;
  int l1_max_iters = 20000;

  // evaluation
  int cycles = 87;
  int train_count = 10;
  std::vector<int> m_values = {12};
  std::vector<std::string> bases = {"learned", "haar", "dct", "diff"};
  std::vector<std::string> solvers = {"sl0", "l1"};

  std::uint64_t seed = 1;

  int node_count() const { return n_sensors + 1; }

  void validate() const {
    auto require = [](bool ok, const std::string& key, const std::string& constraint) {
      if (!ok) throw ConfigError("config: " + key + " " + constraint);
    };
    require(n_sensors >= 1, "topology.n_sensors", "must be >= 1");
    require(radius > 0.0 && radius <= 1.4143, "topology.radius", "must be in (0, sqrt(2)]");
    require(field_variance > 0.0, "field.variance", "must be > 0");
    require(length_scale > 0.0, "field.length_scale", "must be > 0");
    require(ar_coeff >= 0.0 && ar_coeff < 1.0, "field.ar_coeff", "must be in [0, 1)");
    require(link_failure_prob >= 0.0 && link_failure_prob < 1.0, "routing.link_failure_prob",
            "must be in [0, 1)");
    require(rand_pool >= 1, "routing.rand_pool", "must be >= 1");
    require(recovery_prob >= 0.0 && recovery_prob <= 1.0, "tomography.recovery_prob",
            "must be in [0, 1]");
    require(train_epsilon > 0.0, "basis.epsilon", "must be > 0");
    require(train_iters >= 1, "basis.iters", "must be >= 1");
    require(cycles >= 1, "evaluation.cycles", "must be >= 1");
    require(train_count >= 1 && train_count < cycles, "evaluation.train_count",
            "must be >= 1 and < cycles");
    require(!m_values.empty(), "evaluation.M", "must be nonempty");
    for (int m : m_values)
      require(m >= 1 && m <= n_sensors, "evaluation.M", "entries must be in [1, n_sensors]");
    require(!bases.empty(), "evaluation.bases", "must be nonempty");
    for (const auto& b : bases)
      require(b == "learned" || b == "haar" || b == "dct" || b == "diff", "evaluation.bases",
              "entries must be one of learned|haar|dct|diff");
    for (const auto& s : solvers)
      require(s == "sl0" || s == "l1", "evaluation.solvers", "entries must be one of sl0|l1");
  }
};

namespace detail {

template <typename T>
void read_key(const nlohmann::json& section, const std::string& section_name,
              const std::string& key, T& out, std::vector<std::string>& seen) {
  seen.push_back(key);
  if (section.contains(key)) {
    try {
      out = section.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: " + section_name + "." + key + " has wrong type");
    }
  }
}

inline void reject_unknown(const nlohmann::json& section, const std::string& section_name,
                           const std::vector<std::string>& seen) {
  for (auto it = section.begin(); it != section.end(); ++it) {
    if (std::find(seen.begin(), seen.end(), it.key()) == seen.end())
      throw ConfigError("config: unknown key " + section_name + "." + it.key());
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  const std::vector<std::string> known_sections = {"topology", "field",  "routing",
                                                   "tomography", "basis", "solver",
                                                   "evaluation", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known_sections.begin(), known_sections.end(), it.key()) ==
        known_sections.end())
      throw ConfigError("config: unknown section " + it.key());
  }

  using detail::read_key;
  using detail::reject_unknown;
  std::vector<std::string> seen;

  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("topology")) {
    const auto& s = j.at("topology");
    seen.clear();
    read_key(s, "topology", "n_sensors", c.n_sensors, seen);
    read_key(s, "topology", "radius", c.radius, seen);
    reject_unknown(s, "topology", seen);
  }
  if (j.contains("field")) {
    const auto& s = j.at("field");
    seen.clear();
    read_key(s, "field", "mean", c.field_mean, seen);
    read_key(s, "field", "variance", c.field_variance, seen);
    read_key(s, "field", "length_scale", c.length_scale, seen);
    read_key(s, "field", "ar_coeff", c.ar_coeff, seen);
    reject_unknown(s, "field", seen);
  }
  if (j.contains("routing")) {
    const auto& s = j.at("routing");
    seen.clear();
    read_key(s, "routing", "link_failure_prob", c.link_failure_prob, seen);
    read_key(s, "routing", "rand_pool", c.rand_pool, seen);
    reject_unknown(s, "routing", seen);
  }
  if (j.contains("tomography")) {
    const auto& s = j.at("tomography");
    seen.clear();
    read_key(s, "tomography", "recovery_prob", c.recovery_prob, seen);
    reject_unknown(s, "tomography", seen);
  }
  if (j.contains("basis")) {
    const auto& s = j.at("basis");
    seen.clear();
    read_key(s, "basis", "epsilon", c.train_epsilon, seen);
    read_key(s, "basis", "step", c.train_step, seen);
    read_key(s, "basis", "iters", c.train_iters, seen);
    read_key(s, "basis", "normalized_similarity", c.normalized_similarity, seen);
    reject_unknown(s, "basis", seen);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    seen.clear();
    read_key(s, "solver", "sl0_sigma_decrease", c.sl0.sigma_decrease, seen);
    read_key(s, "solver", "sl0_mu", c.sl0.mu, seen);
    read_key(s, "solver", "sl0_inner_iters", c.sl0.inner_iters, seen);
    read_key(s, "solver", "sl0_sigma_min_ratio", c.sl0.sigma_min_ratio, seen);
    read_key(s, "solver", "l1_tol", c.l1_tol, seen);
    read_key(s, "solver", "l1_max_iters", c.l1_max_iters, seen);
    reject_unknown(s, "solver", seen);
  }
  if (j.contains("evaluation")) {
    const auto& s = j.at("evaluation");
    seen.clear();
    read_key(s, "evaluation", "cycles", c.cycles, seen);
    read_key(s, "evaluation", "train_count", c.train_count, seen);
    seen.push_back("M");
    if (s.contains("M")) {
      if (s.at("M").is_array())
        c.m_values = s.at("M").get<std::vector<int>>();
      else
        c.m_values = {s.at("M").get<int>()};
    }
    read_key(s, "evaluation", "bases", c.bases, seen);
    read_key(s, "evaluation", "solvers", c.solvers, seen);
    reject_unknown(s, "evaluation", seen);
  }

  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["topology"] = {{"n_sensors", c.n_sensors}, {"radius", c.radius}};
  j["field"] = {{"mean", c.field_mean},
                {"variance", c.field_variance},
                {"length_scale", c.length_scale},
                {"ar_coeff", c.ar_coeff}};
  j["routing"] = {{"link_failure_prob", c.link_failure_prob}, {"rand_pool", c.rand_pool}};
  j["tomography"] = {{"recovery_prob", c.recovery_prob}};
  j["basis"] = {{"epsilon", c.train_epsilon},
                {"step", c.train_step},
                {"iters", c.train_iters},
                {"normalized_similarity", c.normalized_similarity}};
  j["solver"] = {{"sl0_sigma_decrease", c.sl0.sigma_decrease},
                 {"sl0_mu", c.sl0.mu},
                 {"sl0_inner_iters", c.sl0.inner_iters},
                 {"sl0_sigma_min_ratio", c.sl0.sigma_min_ratio},
                 {"l1_tol", c.l1_tol},
                 {"l1_max_iters", c.l1_max_iters}};
  j["evaluation"] = {{"cycles", c.cycles},
                     {"train_count", c.train_count},
                     {"M", c.m_values},
                     {"bases", c.bases},
                     {"solvers", c.solvers}};
  return j;
}

}  // namespace csr
