// csr: compressed-sensing data collection over simulated multi-hop sensor
// networks. Staged pipeline: topo -> simulate -> train-basis -> recover ->
// evaluate -> report. Every stage reads the config plus prior artifacts
// from the output directory and updates manifest.json.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csr/config.hpp"
#include "csr/evaluation.hpp"
#include "csr/io.hpp"

namespace fs = std::filesystem;
using csr::json;

namespace {

constexpr const char* kVersion = "csr 0.1.0";

struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  csr::ExperimentConfig cfg;
  fs::path out;

  fs::path artifact(const std::string& name) const { return out / name; }

  json require_artifact(const std::string& name, const std::string& prior_stage) const {
    const fs::path p = artifact(name);
    if (!fs::exists(p))
      throw StageError("missing artifact " + name + "; run '" + prior_stage + "' first");
    return csr::read_json_file(p.string());
  }

  void update_manifest(const std::string& stage, const std::vector<std::string>& artifacts) {
    const fs::path p = artifact("manifest.json");
    json m;
    if (fs::exists(p)) m = csr::read_json_file(p.string());
    m["version"] = kVersion;
    m["config"] = csr::config_to_json(cfg);
    m["seed"] = cfg.seed;
    for (const auto& a : artifacts) m["artifacts"][a] = a;
    m["stages"][stage] = true;
    csr::write_json_file(m, p.string());
  }
};

std::uint64_t routing_seed(const csr::ExperimentConfig& cfg, int cycle_idx) {
  return csr::mix_seed(cfg.seed, 0x100000ULL + static_cast<std::uint64_t>(cycle_idx));
}

std::uint64_t collect_seed(const csr::ExperimentConfig& cfg, int cycle_idx, int M) {
  return csr::mix_seed(cfg.seed, 0x200000ULL + static_cast<std::uint64_t>(cycle_idx) * 977 +
                                     static_cast<std::uint64_t>(M));
}

std::uint64_t recovery_seed(const csr::ExperimentConfig& cfg, int cycle_idx) {
  return csr::mix_seed(cfg.seed, 0x300000ULL + static_cast<std::uint64_t>(cycle_idx));
}

void cmd_topo(Context& ctx) {
  const csr::WsnGraph graph = csr::random_geometric_topology(
      ctx.cfg.node_count(), ctx.cfg.radius, csr::mix_seed(ctx.cfg.seed, 0x746f706fULL));
  csr::write_json_file(csr::to_json(graph), ctx.artifact("topology.json").string());
  ctx.update_manifest("topo", {"topology.json"});
  std::cout << "topology: " << graph.n << " nodes, " << graph.edges.size()
            << " edges, sink " << graph.sink_id << "\n";
}

void cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const csr::WsnGraph graph =
      csr::wsn_graph_from_json(ctx.require_artifact("topology.json", "topo"));
  const auto fields = csr::synth_field_series(graph, cfg.field_mean, cfg.field_variance,
                                              cfg.length_scale, cfg.ar_coeff, cfg.cycles,
                                              cfg.seed);
  csr::write_json_file(csr::to_json(fields), ctx.artifact("fields.json").string());

  const int M = cfg.m_values.front();
  json cycles = json::array();
  for (int c = 0; c < cfg.cycles; ++c) {
    const auto routing = csr::build_cycle_routing(graph, cfg.link_failure_prob, cfg.rand_pool,
                                                  routing_seed(cfg, c), fields[c].cycle_id);
    const auto cycle =
        csr::collect_cycle(graph, routing, fields[c], M, collect_seed(cfg, c, M));
    cycles.push_back(csr::to_json(cycle));
  }
  csr::write_json_file(cycles, ctx.artifact("cycles.json").string());
  ctx.update_manifest("simulate", {"fields.json", "cycles.json"});
  std::cout << "simulated " << cfg.cycles << " cycles at M=" << M << "\n";
}

csr::LearnedBasisArtifacts train_from_artifacts(const Context& ctx, const csr::WsnGraph& graph,
                                                const json& cycles_json) {
  const auto& cfg = ctx.cfg;
  std::vector<std::vector<std::vector<int>>> recovered_paths;
  std::vector<Eigen::VectorXd> train_fields;
  const csr::PathRecoveryModel model{cfg.recovery_prob};
  for (int c = 0; c < cfg.train_count; ++c) {
    const csr::CollectionCycle cycle = csr::cycle_from_json(cycles_json.at(c));
    const auto rec = csr::recover_paths(cycle, model, recovery_seed(cfg, c));
    recovered_paths.push_back(rec.paths);
    train_fields.push_back(cycle.field.values);
  }
  csr::TrainingOptions opts{cfg.train_epsilon, cfg.train_step, cfg.train_iters,
                            cfg.normalized_similarity};
  return csr::learn_basis(graph, recovered_paths, train_fields, opts);
}

void cmd_train_basis(Context& ctx) {
  const csr::WsnGraph graph =
      csr::wsn_graph_from_json(ctx.require_artifact("topology.json", "topo"));
  const json cycles_json = ctx.require_artifact("cycles.json", "simulate");
  const auto art = train_from_artifacts(ctx, graph, cycles_json);

  csr::write_json_file(csr::to_json(art.wavelets, art.embedding),
                       ctx.artifact("basis.json").string());
  csr::write_matrix_csv(art.basis.psi, ctx.artifact("psi.csv").string());
  csr::write_matrix_csv(art.complement_matrices.laplacian,
                        ctx.artifact("complement_laplacian.csv").string());
  ctx.update_manifest("train-basis", {"basis.json", "psi.csv", "complement_laplacian.csv"});
  std::cout << "trained basis over " << ctx.cfg.train_count << " cycles; URTG edges "
            << art.urtg_union.edges.size() << "\n";
}

std::map<std::string, csr::RepresentationBasis> build_bases(const Context& ctx,
                                                            const json& basis_json) {
  std::map<std::string, csr::RepresentationBasis> bases;
  for (const auto& name : ctx.cfg.bases) {
    if (name == "learned") {
      const auto [w, emb] = csr::wavelets_from_json(basis_json);
      bases[name] = csr::assemble_basis(w, emb);
    } else {
      bases[name] = csr::baseline_basis(name, ctx.cfg.n_sensors);
    }
  }
  return bases;
}

void cmd_recover(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const csr::WsnGraph graph =
      csr::wsn_graph_from_json(ctx.require_artifact("topology.json", "topo"));
  const json cycles_json = ctx.require_artifact("cycles.json", "simulate");
  const json basis_json = ctx.require_artifact("basis.json", "train-basis");
  const auto bases = build_bases(ctx, basis_json);
  const csr::PathRecoveryModel model{cfg.recovery_prob};

  json out = json::array();
  for (int c = cfg.train_count; c < cfg.cycles; ++c) {
    const csr::CollectionCycle cycle = csr::cycle_from_json(cycles_json.at(c));
    const auto rec = csr::recover_paths(cycle, model, recovery_seed(cfg, c));
    if (rec.paths.empty()) {
      out.push_back({{"cycle_id", cycle.cycle_id}, {"dropped", true}});
      continue;
    }
    const auto mm = csr::build_measurement_matrix(cycle, rec, graph);
    for (const auto& [name, basis] : bases) {
      const Eigen::MatrixXd A = mm.rows * basis.psi;
      for (const auto& solver : cfg.solvers) {
        const csr::SparseSolution sol =
            solver == "sl0" ? csr::sl0_solve(A, mm.y_kept, cfg.sl0)
                            : csr::l1_solve(A, mm.y_kept, cfg.l1_tol, cfg.l1_max_iters);
        const Eigen::VectorXd x_hat = csr::recover_field(basis, sol.s);
        out.push_back({{"cycle_id", cycle.cycle_id},
                       {"basis", name},
                       {"solver", solver},
                       {"m_effective", static_cast<int>(rec.paths.size())},
                       {"x_hat", csr::vector_to_json(x_hat)},
                       {"error_percent", csr::approximation_error(x_hat, cycle.field.values)}});
      }
    }
  }
  csr::write_json_file(out, ctx.artifact("recovered.json").string());
  ctx.update_manifest("recover", {"recovered.json"});
  std::cout << "recovered " << cfg.cycles - cfg.train_count << " test cycles\n";
}

void cmd_evaluate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  csr::ExperimentContext ectx;
  ectx.graph = csr::wsn_graph_from_json(ctx.require_artifact("topology.json", "topo"));
  ectx.fields = csr::fields_from_json(ctx.require_artifact("fields.json", "simulate"));
  const json basis_json = ctx.require_artifact("basis.json", "train-basis");
  ectx.bases = build_bases(ctx, basis_json);

  const csr::RecoveryReport report = csr::sweep_M(cfg, ectx, cfg.m_values);
  csr::write_report_csv(report, ctx.artifact("report.csv").string());
  csr::write_json_file(csr::summary_json(report), ctx.artifact("summary.json").string());
  ctx.update_manifest("evaluate", {"report.csv", "summary.json"});
  std::cout << "evaluated " << report.rows.size() << " report rows\n";
}

void cmd_report(Context& ctx) {
  if (!fs::exists(ctx.artifact("report.csv")))
    throw StageError("missing artifact report.csv; run 'evaluate' first");
  const json summary = ctx.require_artifact("summary.json", "evaluate");

  // error vs cycle at the first M, CSR rows
  std::ifstream in(ctx.artifact("report.csv"));
  std::string line;
  std::getline(in, line);  // header
  std::ofstream evc(ctx.artifact("error_vs_cycle.csv"));
  evc << "cycle_id,scheme,basis,solver,error_percent\n";
  const std::string first_m = std::to_string(ctx.cfg.m_values.front());
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() >= 10 && f[4] == first_m)
      evc << f[0] << ',' << f[1] << ',' << f[2] << ',' << f[3] << ',' << f[6] << '\n';
  }

  std::ofstream evm(ctx.artifact("error_vs_M.csv"));
  evm << "M,scheme,basis,solver,mean_error_percent\n";
  std::ofstream tvm(ctx.artifact("transmissions_vs_M.csv"));
  tvm << "M,scheme,transmissions\n";
  std::map<std::pair<int, std::string>, long> tx;
  for (const auto& row : summary) {
    evm << row.at("M").get<int>() << ',' << row.at("scheme").get<std::string>() << ','
        << row.at("basis").get<std::string>() << ',' << row.at("solver").get<std::string>()
        << ',' << csr::format_double(row.at("mean_error_percent").get<double>()) << '\n';
    tx[{row.at("M").get<int>(), row.at("scheme").get<std::string>()}] =
        row.at("transmissions").get<long>();
  }
  for (const auto& [key, t] : tx) tvm << key.first << ',' << key.second << ',' << t << '\n';

  ctx.update_manifest("report",
                      {"error_vs_cycle.csv", "error_vs_M.csv", "transmissions_vs_M.csv"});
  std::cout << "plot data written\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-sensing data collection for multi-hop sensor networks"};
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;

  app.add_option("--config", config_path, "Path to JSON config file");
  app.add_option("--out", out_dir, "Output directory for artifacts");
  app.add_option("--seed", seed_override, "Override config seed");
  app.add_option("--threads", threads, "Worker threads for evaluation");
  app.require_subcommand(1);

  auto* topo = app.add_subcommand("topo", "Generate the deployment topology");
  auto* simulate = app.add_subcommand("simulate", "Simulate field series and collection cycles");
  auto* train = app.add_subcommand("train-basis", "Learn the representation basis");
  auto* recover = app.add_subcommand("recover", "Reconstruct test-cycle fields");
  auto* evaluate = app.add_subcommand("evaluate", "Run the full recovery evaluation");
  auto* report = app.add_subcommand("report", "Emit plot-data CSVs from the evaluation");

  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx;
    if (!config_path.empty()) {
      ctx.cfg = csr::config_from_json(csr::read_json_file(config_path));
    } else {
      ctx.cfg.validate();
    }
    if (seed_override) ctx.cfg.seed = *seed_override;
    ctx.out = out_dir;
    fs::create_directories(ctx.out);

    if (topo->parsed()) cmd_topo(ctx);
    if (simulate->parsed()) cmd_simulate(ctx);
    if (train->parsed()) cmd_train_basis(ctx);
    if (recover->parsed()) cmd_recover(ctx);
    if (evaluate->parsed()) cmd_evaluate(ctx);
    if (report->parsed()) cmd_report(ctx);
    return 0;
  } catch (const csr::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
