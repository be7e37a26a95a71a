#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "csr/basis.hpp"
#include "csr/config.hpp"
#include "csr/gle.hpp"
#include "csr/graph.hpp"
#include "csr/io.hpp"
#include "csr/lifting.hpp"
#include "csr/routing.hpp"
#include "csr/solvers.hpp"
#include "csr/tomography.hpp"

namespace csr {

// Relative rms error as a percentage. The 1/N factors cancel.
inline double approximation_error(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x) {
  if (x_hat.size() != x.size()) throw std::invalid_argument("approximation_error: length mismatch");
  const double denom = x.norm();
  if (denom == 0.0) throw std::invalid_argument("zero reference signal");
  return (x_hat - x).norm() / denom * 100.0;
}

struct LearnedBasisArtifacts {
  SimpleGraph urtg_union;
  SimpleGraph complement;
  GraphMatrices complement_matrices;
  Embedding embedding;
  LiftedWavelets wavelets;
  RepresentationBasis basis;
};

struct TrainingOptions {
  double epsilon = 25.0;
  double step = 0.1;
  int iters = 2000;
  bool normalized_similarity = false;
};

// Full basis pipeline: per-cycle URTGs from recovered paths, union,
// complement, GLE embedding, then lifting operators trained on the
// embedded training fields.
inline LearnedBasisArtifacts learn_basis(
    const WsnGraph& graph, const std::vector<std::vector<std::vector<int>>>& recovered_paths,
    const std::vector<Eigen::VectorXd>& train_fields, const TrainingOptions& opts = {}) {
  if (recovered_paths.empty()) throw std::invalid_argument("learn_basis: no training cycles");
  if (train_fields.empty()) throw std::invalid_argument("learn_basis: no training fields");

  LearnedBasisArtifacts art;
  std::vector<SimpleGraph> urtgs;
  urtgs.reserve(recovered_paths.size());
  for (const auto& paths : recovered_paths) urtgs.push_back(urtg_from_paths(paths, graph));
  art.urtg_union = union_graph(urtgs);
  art.complement = complement_graph(art.urtg_union);
  art.complement_matrices = graph_matrices(art.complement);
  if (!art.complement.connected())
    throw std::runtime_error("learn_basis: complement graph not connected");
  art.embedding = gle_embed(art.complement, opts.normalized_similarity);

  const int N = graph.sensor_count();
  std::vector<Eigen::VectorXd> embedded;
  embedded.reserve(train_fields.size());
  for (const auto& f : train_fields) {
    if (f.size() != N) throw std::invalid_argument("learn_basis: field length mismatch");
    Eigen::VectorXd e(N);
    for (int p = 0; p < N; ++p) e[p] = f[art.embedding.order[p]];
    embedded.push_back(e);
  }
  art.wavelets =
      train_lifting(dyadic_partition(N), embedded, opts.epsilon, opts.step, opts.iters);
  art.basis = assemble_basis(art.wavelets, art.embedding);
  return art;
}

struct ReportRow {
  int cycle_id = 0;
  std::string scheme;
  std::string basis;
  std::string solver;
  int m_requested = 0;
  int m_effective = 0;
  double error_percent = 0.0;
  bool flagged = false;
  long transmissions = 0;
  long overhead_bytes = 0;
};

struct RecoveryReport {
  std::vector<ReportRow> rows;
};

struct SparsificationRow {
  std::string basis;
  int k = 0;
  double mean_error = 0.0;
};

inline std::vector<SparsificationRow> sparsification_study(
    const std::vector<RepresentationBasis>& bases, const std::vector<Eigen::VectorXd>& fields,
    const std::vector<int>& k_values) {
  std::vector<SparsificationRow> out;
  for (const auto& basis : bases) {
    for (int k : k_values) {
      double sum = 0.0;
      for (const auto& x : fields) {
        const Eigen::VectorXd s = basis.forward(x);
        const Eigen::VectorXd x_hat = basis.psi * k_term_approx(s, k);
        sum += approximation_error(x_hat, x);
      }
      out.push_back({basis.name, k, sum / static_cast<double>(fields.size())});
    }
  }
  return out;
}

struct ExperimentContext {
  WsnGraph graph;
  std::vector<SensorField> fields;
  std::map<std::string, RepresentationBasis> bases;
};

namespace detail {

inline SparseSolution run_solver(const std::string& solver, const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& y, const ExperimentConfig& cfg) {
  if (solver == "sl0") return sl0_solve(A, y, cfg.sl0);
  if (solver == "l1") return l1_solve(A, y, cfg.l1_tol, cfg.l1_max_iters);
  throw std::invalid_argument("unknown solver '" + solver + "'");
}

inline void score_cycle(const ExperimentConfig& cfg, const ExperimentContext& ctx,
                        const std::string& scheme, int cycle_id, int M, int m_effective,
                        const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& x, long transmissions, long overhead,
                        RecoveryReport& report) {
  for (const auto& basis_name : cfg.bases) {
    const auto& basis = ctx.bases.at(basis_name);
    for (const auto& solver : cfg.solvers) {
      ReportRow row{cycle_id, scheme,      basis_name, solver,  M, m_effective, 0.0,
                    false,    transmissions, overhead};
      if (m_effective == 0) {
        row.error_percent = 100.0;
        row.flagged = true;
      } else if (x.norm() == 0.0) {
        row.error_percent = 0.0;
        row.flagged = true;  // zero reference signal, Eq.-of-merit undefined
      } else {
        const Eigen::MatrixXd A = phi * basis.psi;
        const SparseSolution sol = detail::run_solver(solver, A, y, cfg);
        row.error_percent = approximation_error(recover_field(basis, sol.s), x);
      }
      report.rows.push_back(row);
    }
  }
}

}  // namespace detail

// One routed-collection experiment over the test cycles at a fixed M.
inline RecoveryReport run_csr_experiment(const ExperimentConfig& cfg,
                                         const ExperimentContext& ctx, int M) {
  RecoveryReport report;
  const PathRecoveryModel model{cfg.recovery_prob};
  for (int c = cfg.train_count; c < cfg.cycles; ++c) {
    const auto& field = ctx.fields[c];
    const RoutingState routing = build_cycle_routing(
        ctx.graph, cfg.link_failure_prob, cfg.rand_pool,
        mix_seed(cfg.seed, 0x100000ULL + static_cast<std::uint64_t>(c)), field.cycle_id);
    const CollectionCycle cycle =
        collect_cycle(ctx.graph, routing, field, M,
                      mix_seed(cfg.seed, 0x200000ULL + static_cast<std::uint64_t>(c) * 977 +
                                             static_cast<std::uint64_t>(M)));
    const RecoveredPaths recovered = recover_paths(
        cycle, model, mix_seed(cfg.seed, 0x300000ULL + static_cast<std::uint64_t>(c)));
    const TransmissionReport tx = transmission_stats(cycle, Scheme::kCsr, cfg.n_sensors);

    const int m_eff = static_cast<int>(recovered.paths.size());
    Eigen::MatrixXd phi;
    Eigen::VectorXd y;
    if (m_eff > 0) {
      const MeasurementMatrix mm = build_measurement_matrix(cycle, recovered, ctx.graph);
      phi = mm.rows;
      y = mm.y_kept;
    }
    detail::score_cycle(cfg, ctx, "CSR", field.cycle_id, M, m_eff, phi, y, field.values,
                        tx.transmissions, tx.overhead_bytes, report);
  }
  return report;
}

// Dense-projection baseline: i.i.d. +-1 measurement matrix applied
// centrally; every node transmits for every measurement.
inline RecoveryReport run_cdg_baseline(const ExperimentConfig& cfg, const ExperimentContext& ctx,
                                       int M) {
  RecoveryReport report;
  const int N = cfg.n_sensors;
  for (int c = cfg.train_count; c < cfg.cycles; ++c) {
    const auto& field = ctx.fields[c];
    Rng rng(mix_seed(cfg.seed, 0x400000ULL + static_cast<std::uint64_t>(c) * 977 +
                                   static_cast<std::uint64_t>(M)));
    Eigen::MatrixXd phi(M, N);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j) phi(i, j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const Eigen::VectorXd y = phi * field.values;
    detail::score_cycle(cfg, ctx, "CDG", field.cycle_id, M, M, phi, y, field.values,
                        static_cast<long>(N) * M, 0, report);
  }
  return report;
}

inline RecoveryReport sweep_M(const ExperimentConfig& cfg, const ExperimentContext& ctx,
                              const std::vector<int>& m_list) {
  if (m_list.empty()) throw std::invalid_argument("sweep_M: empty M list");
  RecoveryReport report;
  for (int M : m_list) {
    if (M > cfg.n_sensors) throw std::invalid_argument("sweep_M: M exceeds sensor count");
    for (const auto& part : {run_csr_experiment(cfg, ctx, M), run_cdg_baseline(cfg, ctx, M)})
      report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  }
  return report;
}

struct AggregateKey {
  std::string scheme, basis, solver;
  int m = 0;
  auto operator<=>(const AggregateKey&) const = default;
};

struct AggregateStats {
  int cycles = 0;
  int flagged = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
  long transmissions = 0;
  long overhead_bytes = 0;
};

inline std::map<AggregateKey, AggregateStats> aggregate_report(const RecoveryReport& report) {
  std::map<AggregateKey, AggregateStats> agg;
  for (const auto& r : report.rows) {
    auto& a = agg[{r.scheme, r.basis, r.solver, r.m_requested}];
    ++a.cycles;
    if (r.flagged) {
      ++a.flagged;
    } else {
      a.mean_error += r.error_percent;
      a.max_error = std::max(a.max_error, r.error_percent);
    }
    a.transmissions += r.transmissions;
    a.overhead_bytes += r.overhead_bytes;
  }
  for (auto& [k, a] : agg)
    if (a.cycles > a.flagged) a.mean_error /= static_cast<double>(a.cycles - a.flagged);
  return agg;
}

inline void write_report_csv(const RecoveryReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "cycle_id,scheme,basis,solver,M,M_effective,error_percent,flagged,"
         "transmissions,overhead_bytes\n";
  for (const auto& r : report.rows) {
    out << r.cycle_id << ',' << r.scheme << ',' << r.basis << ',' << r.solver << ','
        << r.m_requested << ',' << r.m_effective << ',' << format_double(r.error_percent) << ','
        << (r.flagged ? 1 : 0) << ',' << r.transmissions << ',' << r.overhead_bytes << '\n';
  }
}

inline nlohmann::json summary_json(const RecoveryReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, a] : aggregate_report(report)) {
    out.push_back({{"scheme", key.scheme},
                   {"basis", key.basis},
                   {"solver", key.solver},
                   {"M", key.m},
                   {"cycles", a.cycles},
                   {"flagged", a.flagged},
                   {"mean_error_percent", a.mean_error},
                   {"max_error_percent", a.max_error},
                   {"transmissions", a.transmissions},
                   {"overhead_bytes", a.overhead_bytes}});
  }
  return out;
}

}  // namespace csr
