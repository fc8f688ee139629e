#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "siu/attack.hpp"
#include "siu/graph.hpp"
#include "siu/schedule.hpp"

namespace siu {

inline constexpr int kMaxGraphRetries = 1000;

struct GraphSource {
  int n = 300;
  double radius = 0.13;
  std::uint64_t seed = 1;
  std::optional<std::string> file;  // edge list; overrides n/radius/seed
};

struct AttackSettings {
  int size = 0;
  AttackMode mode = AttackMode::kFixed;
  std::string strategy = "negation";  // none | negation | constant-offset | random-bounded
  std::uint64_t seed = 0;
  std::vector<double> offset;
  double magnitude = 1.0;
};

struct ThetaSource {
  std::optional<std::vector<double>> value;  // explicit theta*
  int dim = 3;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  GraphSource graph;
  ScheduleConfig schedule;  // n_agents is filled in from the graph
  AttackSettings attack;
  ThetaSource theta;
  std::int64_t iterations = 500000;
  std::int64_t log_stride = 500;
  std::string output;  // directory; empty = no files
  bool override_validation = false;
};

/// Flat key/value view: nested objects are flattened to dotted keys, so
/// {"attack": {"size": 60}} and {"attack.size": 60} are equivalent.
/// Unknown keys throw std::invalid_argument.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Applies one "key=value" override; value is parsed as JSON, falling back to a string.
void apply_override(ExperimentConfig& config, const std::string& assignment);
void apply_key(ExperimentConfig& config, const std::string& key, const nlohmann::json& value);
/// Resolved configuration as a flat JSON object (doubles print round-trip).
nlohmann::json config_to_json(const ExperimentConfig& config);

AttackPlan make_attack_plan(const AttackSettings& settings, int dim);

/// Uniform in the closed l2 ball of radius eta. eta = 0 gives the zero vector.
Eigen::VectorXd sample_theta(int dim, double eta, std::uint64_t seed);

struct ProvisionedGraph {
  Graph graph;
  SpectralSummary spectrum;
  std::uint64_t seed_used = 0;
  int retries = 0;
};

/// Loads or generates the network, regenerating with seed+1, seed+2, ... until
/// connected (at most kMaxGraphRetries retries). Throws ValidationError otherwise.
ProvisionedGraph provision_graph(const GraphSource& source);

struct MetricsRow {
  std::int64_t t = 0;
  double max_err = 0.0;
  double mean_err = 0.0;
  double V = 0.0;
  double W = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_total = 0.0;
  bool inv_v = true;
  bool inv_w = true;
  bool inv_err = true;
};

inline constexpr const char* kMetricsHeader = "t,max_err,mean_err,V,W,gamma1,gamma2,gamma_total,inv_v,inv_w,inv_err";

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

struct RunSummary {
  int n_agents = 0;
  int dim = 0;
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  std::uint64_t graph_seed = 0;
  std::vector<double> theta;
  std::int64_t iterations = 0;
  double initial_max_err = 0.0;
  double final_max_err = 0.0;
  double final_gamma = 0.0;
  int max_attacked = 0;
  bool premise_held = false;  // |A_t|/N < s for every t
  std::int64_t invariant_violations = 0;  // steps where any of V<=g1, W<=g2, max_err<=g failed
  std::int64_t first_violation_t = -1;
  std::int64_t unattacked_gain_violations = 0;  // unattacked agents with K_n(t) != 1
  bool invariants_held = true;  // false only if the premise held and a flag failed
  double tail_slope = 0.0;      // fit of log max_err vs log(t+1) over t >= T/2
  double reference_slope = 0.0; // -(tau1 - tau2)
  std::vector<std::string> validation_messages;
  std::vector<MetricsRow> rows;
};

nlohmann::json summary_to_json(const RunSummary& summary);

/// Runs the full experiment. Throws ValidationError (invalid schedule unless
/// overridden, unreachable connectivity), DivergenceError (non-finite state).
/// Invariant violations are reported in the summary. When config.output is
/// set, writes metrics.csv, graph.txt, config.json and summary.json there.
RunSummary run(const ExperimentConfig& config);

struct SweepRow {
  double s = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_total = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;         // sorted by s
  std::vector<std::string> skipped;   // one diagnostic per rejected s
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  int n_agents = 0;
};

/// Evolves only the threshold recursion for each s and reports gamma at T.
SweepResult sweep_resilience(const ExperimentConfig& base, const std::vector<double>& s_values, std::int64_t horizon);
SweepResult sweep_resilience(const ScheduleConfig& base, const SpectralSummary& spectrum,
                             const std::vector<double>& s_values, std::int64_t horizon, bool override_validation);

void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace siu
