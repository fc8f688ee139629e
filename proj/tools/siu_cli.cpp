// siu: command-line front end for the saturated-innovation estimation experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "siu/error.hpp"
#include "siu/graph.hpp"
#include "siu/harness.hpp"
#include "siu/lemma_lab.hpp"

namespace {

using nlohmann::json;

int exit_code(siu::ExitCode c) { return static_cast<int>(c); }

siu::ExperimentConfig resolve_config(const std::string& path, const std::vector<std::string>& sets) {
  siu::ExperimentConfig cfg = path.empty() ? siu::ExperimentConfig{} : siu::load_config(path);
  for (const auto& s : sets) siu::apply_override(cfg, s);
  return cfg;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw siu::Error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturated innovation update: resilient distributed estimation under sensor attacks"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one estimation experiment and write metrics");
  std::string run_config;
  std::vector<std::string> run_sets;
  std::optional<std::string> run_output;
  std::optional<std::int64_t> run_iterations;
  std::optional<std::int64_t> run_stride;
  bool run_override = false;
  run_cmd->add_option("-c,--config", run_config, "JSON config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--set", run_sets, "Override a config key (key=value), repeatable");
  run_cmd->add_option("-o,--output", run_output, "Output directory");
  run_cmd->add_option("-T,--iterations", run_iterations, "Number of iterations");
  run_cmd->add_option("--log-stride", run_stride, "Iterations between metric rows");
  run_cmd->add_flag("--override-validation", run_override, "Run even if parameter constraints are violated");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Threshold gamma_T as a function of the resilience index s");
  std::string sweep_config;
  std::vector<std::string> sweep_sets;
  std::string sweep_s;
  std::string sweep_grid;
  std::optional<std::int64_t> sweep_iterations;
  std::string sweep_out;
  bool sweep_override = false;
  sweep_cmd->add_option("-c,--config", sweep_config, "JSON config file (graph and schedule)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--set", sweep_sets, "Override a config key (key=value), repeatable");
  auto* s_opt = sweep_cmd->add_option("--s", sweep_s, "Comma-separated s values");
  sweep_cmd->add_option("--grid", sweep_grid, "lo,hi,count: evenly spaced s values")->excludes(s_opt);
  sweep_cmd->add_option("-T,--iterations", sweep_iterations, "Horizon T");
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV output file (default stdout)");
  sweep_cmd->add_flag("--override-validation", sweep_override, "Keep s values that violate constraints");

  // lemma
  auto* lemma_cmd = app.add_subcommand("lemma", "Simulate the time-varying recursions and certify decay");
  std::string system = "modified";
  siu::lemma::ScalarSystemConfig lc;
  std::int64_t horizon = 1000000;
  std::optional<double> delta0;
  double tail_fraction = siu::lemma::kDefaultTailFraction;
  double shrink = siu::lemma::kDefaultShrinkFactor;
  std::string csv_out;
  std::string lemma_schedule;
  lemma_cmd->add_option("--system", system, "basic | modified | coupled | gamma")
      ->check(CLI::IsMember({"basic", "modified", "coupled", "gamma"}));
  lemma_cmd->add_option("--c1", lc.c1);
  lemma_cmd->add_option("--c2", lc.c2);
  lemma_cmd->add_option("--delta1", lc.delta1);
  lemma_cmd->add_option("--delta2", lc.delta2);
  lemma_cmd->add_option("--c3", lc.c3);
  lemma_cmd->add_option("--c4", lc.c4);
  lemma_cmd->add_option("--c5", lc.c5);
  lemma_cmd->add_option("--c6", lc.c6);
  lemma_cmd->add_option("--c7", lc.c7);
  lemma_cmd->add_option("--v0", lc.v0);
  lemma_cmd->add_option("--w0", lc.w0);
  lemma_cmd->add_option("-T,--horizon", horizon, "Number of iterations");
  lemma_cmd->add_option("--delta0", delta0, "Exponent for the decay check");
  lemma_cmd->add_option("--tail-fraction", tail_fraction);
  lemma_cmd->add_option("--shrink-factor", shrink);
  lemma_cmd->add_option("--csv", csv_out, "Write the trajectory as CSV");
  lemma_cmd->add_option("--config", lemma_schedule,
                        "With --system gamma: experiment config whose threshold recursion is simulated")
      ->check(CLI::ExistingFile);

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Generate or inspect communication graphs");
  graph_cmd->require_subcommand(1);
  auto* gen_cmd = graph_cmd->add_subcommand("generate", "Random geometric graph as an edge list");
  int gen_n = 300;
  double gen_radius = 0.13;
  std::uint64_t gen_seed = 1;
  bool gen_connected = false;
  std::string gen_out;
  gen_cmd->add_option("-n", gen_n, "Number of vertices");
  gen_cmd->add_option("-r,--radius", gen_radius, "Connection radius (unit square)");
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_flag("--connected", gen_connected, "Regenerate with seed+1, ... until connected");
  gen_cmd->add_option("-o,--output", gen_out, "Edge-list file (default stdout)");
  auto* inspect_cmd = graph_cmd->add_subcommand("inspect", "Connectivity and Laplacian spectrum of an edge list");
  std::string inspect_file;
  inspect_cmd->add_option("file", inspect_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      siu::ExperimentConfig cfg = resolve_config(run_config, run_sets);
      if (run_output) cfg.output = *run_output;
      if (run_iterations) cfg.iterations = *run_iterations;
      if (run_stride) cfg.log_stride = *run_stride;
      if (run_override) cfg.override_validation = true;
      const siu::RunSummary sum = siu::run(cfg);
      std::cout << siu::summary_to_json(sum).dump(2) << '\n';
      if (!sum.invariants_held) {
        std::cerr << "invariant violation: " << sum.invariant_violations << " step(s), first at t="
                  << sum.first_violation_t << "; unattacked gain violations: " << sum.unattacked_gain_violations
                  << '\n';
        return exit_code(siu::ExitCode::kInvariant);
      }
      return 0;
    }

    if (*sweep_cmd) {
      siu::ExperimentConfig cfg = resolve_config(sweep_config, sweep_sets);
      if (sweep_override) cfg.override_validation = true;
      std::vector<double> s_values;
      if (!sweep_grid.empty()) {
        const auto g = parse_list(sweep_grid);
        if (g.size() != 3 || g[2] < 1) throw std::invalid_argument("--grid expects lo,hi,count");
        const int count = static_cast<int>(g[2]);
        for (int i = 0; i < count; ++i) {
          s_values.push_back(count == 1 ? g[0] : g[0] + (g[1] - g[0]) * i / (count - 1));
        }
      } else {
        s_values = parse_list(sweep_s.empty() ? "0.201,0.401" : sweep_s);
      }
      const std::int64_t T = sweep_iterations.value_or(cfg.iterations);
      const siu::SweepResult res = siu::sweep_resilience(cfg, s_values, T);
      for (const auto& msg : res.skipped) std::cerr << "skipped " << msg << '\n';
      std::ostringstream os;
      siu::write_sweep_csv(os, res);
      emit(sweep_out, os.str());
      return res.rows.empty() ? exit_code(siu::ExitCode::kValidation) : 0;
    }

    if (*lemma_cmd) {
      namespace lm = siu::lemma;
      lm::TrajectoryRecord traj;
      if (system == "basic") {
        traj = lm::simulate_basic(lc, horizon);
      } else if (system == "modified") {
        traj = lm::simulate_modified(lc, horizon);
      } else if (system == "coupled") {
        traj = lm::simulate_coupled(lc, horizon);
      } else {
        const siu::ExperimentConfig cfg = resolve_config(lemma_schedule, {});
        const siu::ProvisionedGraph pg = siu::provision_graph(cfg.graph);
        siu::ScheduleConfig sched = cfg.schedule;
        sched.set_n_agents(pg.graph.num_vertices());
        lc = lm::coupled_from_schedule(sched, pg.spectrum.lambda2);
        traj = lm::simulate_coupled(lc, horizon);
      }
      if (!csv_out.empty()) {
        std::ostringstream os;
        lm::write_csv(os, traj);
        emit(csv_out, os.str());
      }
      json report;
      report["system"] = system;
      report["horizon"] = horizon;
      report["samples"] = traj.size();
      report["sup_abs"] = lm::sup_abs(traj);
      report["final_v"] = traj.v.back();
      if (traj.has_w()) report["final_w"] = traj.w.back();
      if (delta0) {
        const auto rep = lm::decay_rate_report(traj, *delta0, tail_fraction, shrink);
        report["delta0"] = *delta0;
        report["first_quarter_max"] = rep.first_quarter_max;
        report["final_quarter_max"] = rep.final_quarter_max;
        report["tail_samples"] = rep.tail_samples;
        report["decay_passed"] = rep.passed;
      }
      std::cout << report.dump(2) << '\n';
      return 0;
    }

    if (*gen_cmd) {
      siu::GraphSource src;
      src.n = gen_n;
      src.radius = gen_radius;
      src.seed = gen_seed;
      siu::Graph g;
      if (gen_connected) {
        auto pg = siu::provision_graph(src);
        std::cerr << "seed used: " << pg.seed_used << '\n';
        g = std::move(pg.graph);
      } else {
        g = siu::random_geometric(gen_n, gen_radius, gen_seed);
      }
      emit(gen_out, siu::to_edge_list(g));
      return 0;
    }

    if (*inspect_cmd) {
      const siu::Graph g = siu::read_edge_list_file(inspect_file);
      json report;
      report["n"] = g.num_vertices();
      report["edges"] = g.num_edges();
      report["max_degree"] = g.max_degree();
      report["connected"] = siu::is_connected(g);
      const auto spec = siu::spectral_bounds(siu::laplacian(g));
      report["lambda2"] = spec.lambda2;
      report["lambdaN"] = spec.lambdaN;
      report["residual"] = spec.residual;
      std::cout << report.dump(2) << '\n';
      return 0;
    }
  } catch (const siu::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(siu::ExitCode::kValidation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(siu::ExitCode::kFailure);
  }
  return 0;
}
