#include "siu/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "siu/error.hpp"
#include "siu/estimator.hpp"
#include "siu/format.hpp"
#include "siu/rng.hpp"

namespace siu {

using nlohmann::json;

namespace {

void flatten(const json& node, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out.emplace_back(prefix, node);
  }
}

template <typename T>
T as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config: bad value for '" + key + "': " + v.dump());
  }
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw std::invalid_argument("config: '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

json to_json_vector(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

}  // namespace

void apply_key(ExperimentConfig& c, const std::string& key, const json& v) {
  if (key == "graph.n") c.graph.n = as<int>(v, key);
  else if (key == "graph.radius") c.graph.radius = as<double>(v, key);
  else if (key == "graph.seed") c.graph.seed = as_seed(v, key);
  else if (key == "graph.file") {
    if (v.is_null()) c.graph.file.reset();
    else c.graph.file = as<std::string>(v, key);
  }
  else if (key == "a" || key == "schedule.a") c.schedule.a = as<double>(v, key);
  else if (key == "b" || key == "schedule.b") c.schedule.b = as<double>(v, key);
  else if (key == "tau1" || key == "schedule.tau1") c.schedule.tau1 = as<double>(v, key);
  else if (key == "tau2" || key == "schedule.tau2") c.schedule.tau2 = as<double>(v, key);
  else if (key == "s" || key == "schedule.s") c.schedule.s = as<double>(v, key);
  else if (key == "eta" || key == "schedule.eta") c.schedule.eta = as<double>(v, key);
  else if (key == "attack.size") c.attack.size = as<int>(v, key);
  else if (key == "attack.mode") c.attack.mode = parse_attack_mode(as<std::string>(v, key));
  else if (key == "attack.strategy") c.attack.strategy = as<std::string>(v, key);
  else if (key == "attack.seed") c.attack.seed = as_seed(v, key);
  else if (key == "attack.offset") c.attack.offset = as<std::vector<double>>(v, key);
  else if (key == "attack.magnitude") c.attack.magnitude = as<double>(v, key);
  else if (key == "theta") {
    if (v.is_null()) c.theta.value.reset();
    else c.theta.value = as<std::vector<double>>(v, key);
  }
  else if (key == "theta.dim") c.theta.dim = as<int>(v, key);
  else if (key == "theta.seed") c.theta.seed = as_seed(v, key);
  else if (key == "iterations") c.iterations = as<std::int64_t>(v, key);
  else if (key == "log_stride") c.log_stride = as<std::int64_t>(v, key);
  else if (key == "output") c.output = as<std::string>(v, key);
  else if (key == "override_validation") c.override_validation = as<bool>(v, key);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  std::vector<std::pair<std::string, json>> flat;
  flatten(doc, "", flat);
  ExperimentConfig c;
  for (const auto& [k, v] : flat) apply_key(c, k, v);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  apply_key(c, key, value);
}

json config_to_json(const ExperimentConfig& c) {
  json j = json::object();
  if (c.graph.file) {
    j["graph.file"] = *c.graph.file;
  } else {
    j["graph.n"] = c.graph.n;
    j["graph.radius"] = c.graph.radius;
    j["graph.seed"] = c.graph.seed;
  }
  j["a"] = c.schedule.a;
  j["b"] = c.schedule.b;
  j["tau1"] = c.schedule.tau1;
  j["tau2"] = c.schedule.tau2;
  j["s"] = c.schedule.s;
  j["eta"] = c.schedule.eta;
  j["attack.size"] = c.attack.size;
  j["attack.mode"] = to_string(c.attack.mode);
  j["attack.strategy"] = c.attack.strategy;
  j["attack.seed"] = c.attack.seed;
  if (!c.attack.offset.empty()) j["attack.offset"] = to_json_vector(c.attack.offset);
  j["attack.magnitude"] = c.attack.magnitude;
  if (c.theta.value) {
    j["theta"] = to_json_vector(*c.theta.value);
  } else {
    j["theta.dim"] = c.theta.dim;
    j["theta.seed"] = c.theta.seed;
  }
  j["iterations"] = c.iterations;
  j["log_stride"] = c.log_stride;
  j["override_validation"] = c.override_validation;
  return j;
}

AttackPlan make_attack_plan(const AttackSettings& s, int dim) {
  AttackPlan plan;
  plan.size = s.size;
  plan.mode = s.mode;
  plan.seed = s.seed;
  if (s.strategy == "none") {
    plan.strategy = AttackStrategy::none();
  } else if (s.strategy == "negation") {
    plan.strategy = AttackStrategy::negation();
  } else if (s.strategy == "constant-offset") {
    if (static_cast<int>(s.offset.size()) != dim) {
      throw std::invalid_argument("config: attack.offset must have " + std::to_string(dim) + " entries");
    }
    plan.strategy = AttackStrategy::constant_offset(Eigen::Map<const Eigen::VectorXd>(s.offset.data(), dim));
  } else if (s.strategy == "random-bounded") {
    plan.strategy = AttackStrategy::random_bounded(s.magnitude);
  } else {
    throw std::invalid_argument("config: unknown attack.strategy '" + s.strategy + "'");
  }
  return plan;
}

Eigen::VectorXd sample_theta(int dim, double eta, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sample_theta: dim must be >= 1");
  if (!(eta >= 0.0)) throw std::invalid_argument("sample_theta: eta must be >= 0");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  if (eta == 0.0) return theta;
  Rng rng = make_rng({seed, 0x7e7aULL});
  std::normal_distribution<double> normal;
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < dim; ++i) theta(i) = normal(rng);
    norm = theta.norm();
  }
  const double radius = eta * std::pow(uniform01(rng), 1.0 / dim);
  theta *= radius / norm;
  const double n2 = theta.norm();
  if (n2 > eta) theta *= eta / n2;
  return theta;
}

ProvisionedGraph provision_graph(const GraphSource& src) {
  ProvisionedGraph out;
  if (src.file) {
    out.graph = read_edge_list_file(*src.file);
    if (!is_connected(out.graph)) throw ValidationError("graph file " + *src.file + " is not connected");
  } else {
    bool ok = false;
    for (int retry = 0; retry <= kMaxGraphRetries; ++retry) {
      const std::uint64_t seed = src.seed + static_cast<std::uint64_t>(retry);
      Graph g = random_geometric(src.n, src.radius, seed);
      if (is_connected(g)) {
        out.graph = std::move(g);
        out.seed_used = seed;
        out.retries = retry;
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ValidationError("no connected geometric graph with n=" + std::to_string(src.n) + ", radius=" +
                            format_double(src.radius) + " after " + std::to_string(kMaxGraphRetries) + " retries");
    }
  }
  out.spectrum = spectral_bounds(laplacian(out.graph));
  return out;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    os << r.t << ',' << format_double(r.max_err) << ',' << format_double(r.mean_err) << ',' << format_double(r.V)
       << ',' << format_double(r.W) << ',' << format_double(r.gamma1) << ',' << format_double(r.gamma2) << ','
       << format_double(r.gamma_total) << ',' << int(r.inv_v) << ',' << int(r.inv_w) << ',' << int(r.inv_err)
       << '\n';
  }
}

json summary_to_json(const RunSummary& s) {
  json j;
  j["n_agents"] = s.n_agents;
  j["dim"] = s.dim;
  j["lambda2"] = s.lambda2;
  j["lambdaN"] = s.lambdaN;
  j["graph_seed"] = s.graph_seed;
  j["theta"] = to_json_vector(s.theta);
  j["iterations"] = s.iterations;
  j["initial_max_err"] = s.initial_max_err;
  j["final_max_err"] = s.final_max_err;
  j["final_gamma"] = s.final_gamma;
  j["max_attacked"] = s.max_attacked;
  j["premise_held"] = s.premise_held;
  j["invariant_violations"] = s.invariant_violations;
  j["first_violation_t"] = s.first_violation_t;
  j["unattacked_gain_violations"] = s.unattacked_gain_violations;
  j["invariants_held"] = s.invariants_held;
  j["tail_slope"] = s.tail_slope;
  j["reference_slope"] = s.reference_slope;
  j["validation"] = s.validation_messages;
  return j;
}

namespace {

MetricsRow make_row(std::int64_t t, const StepDiagnostics& d, const GammaState& g) {
  return {t, d.max_err, d.mean_err, d.V, d.W, g.gamma1, g.gamma2, gamma_total(g), d.v_ok, d.w_ok, d.err_ok};
}

double fit_tail_slope(const std::vector<MetricsRow>& rows, std::int64_t horizon) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& r : rows) {
    if (2 * r.t < horizon || !(r.max_err > 0.0)) continue;
    const double x = std::log(static_cast<double>(r.t + 1));
    const double y = std::log(r.max_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) return 0.0;
  const double den = k * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (k * sxy - sx * sy) / den;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunSummary run(const ExperimentConfig& config) {
  if (config.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (config.log_stride < 1) throw ValidationError("log_stride must be >= 1");

  ProvisionedGraph pg = provision_graph(config.graph);
  const Graph& graph = pg.graph;
  const int n = graph.num_vertices();

  ScheduleConfig sched = config.schedule;
  sched.set_n_agents(n);

  RunSummary sum;
  sum.n_agents = n;
  sum.lambda2 = pg.spectrum.lambda2;
  sum.lambdaN = pg.spectrum.lambdaN;
  sum.graph_seed = pg.seed_used;
  sum.iterations = config.iterations;
  sum.reference_slope = -(sched.tau1 - sched.tau2);

  const auto violations = validate(sched, pg.spectrum.lambdaN, pg.spectrum.lambda2);
  for (const auto& v : violations) sum.validation_messages.push_back(v.message);
  if (!violations.empty() && !config.override_validation) {
    throw ValidationError("schedule validation failed: " + describe(violations));
  }

  Eigen::VectorXd theta;
  if (config.theta.value) {
    theta = Eigen::Map<const Eigen::VectorXd>(config.theta.value->data(),
                                              static_cast<Eigen::Index>(config.theta.value->size()));
    if (theta.size() < 1) throw ValidationError("theta must have at least one entry");
    if (theta.norm() > sched.eta) {
      throw ValidationError("||theta*|| = " + format_double(theta.norm()) + " exceeds eta = " +
                            format_double(sched.eta));
    }
  } else {
    theta = sample_theta(config.theta.dim, sched.eta, config.theta.seed);
  }
  const int dim = static_cast<int>(theta.size());
  sum.dim = dim;
  sum.theta.assign(theta.data(), theta.data() + dim);

  AttackPlan plan = make_attack_plan(config.attack, dim);
  if (plan.size < 0 || plan.size >= n) {
    throw ValidationError("attack.size must satisfy 0 <= S < N (S=" + std::to_string(plan.size) + ", N=" +
                          std::to_string(n) + ")");
  }
  Attacker attacker(plan, n);
  sum.max_attacked = plan.strategy.active() ? plan.size : 0;
  sum.premise_held = static_cast<double>(sum.max_attacked) / n < sched.s;

  EstimatorState state = initial_state(n, dim);
  GammaState gamma = gamma_initial(sched);
  std::vector<double> gains(static_cast<std::size_t>(n), 1.0);

  auto check = [&](const StepDiagnostics& d, std::int64_t t) {
    if (!std::isfinite(d.max_err) || !std::isfinite(d.V) || !std::isfinite(gamma_total(gamma))) {
      throw DivergenceError("non-finite estimator state at t=" + std::to_string(t));
    }
    if (!d.all_ok()) {
      ++sum.invariant_violations;
      if (sum.first_violation_t < 0) sum.first_violation_t = t;
    }
  };

  for (std::int64_t t = 0; t < config.iterations; ++t) {
    const StepDiagnostics d = diagnostics(state, theta, gamma);
    check(d, t);
    if (t == 0) sum.initial_max_err = d.max_err;
    if (t % config.log_stride == 0) sum.rows.push_back(make_row(t, d, gamma));

    const Measurement meas = attacker.measure(theta, t);
    state = siu_step(state, graph, meas, alpha(sched, t), beta(sched, t), gamma_total(gamma), gains);
    for (int a = 0; a < n; ++a) {
      if (!meas.attacked[static_cast<std::size_t>(a)] && gains[static_cast<std::size_t>(a)] != 1.0) {
        ++sum.unattacked_gain_violations;
      }
    }
    gamma = gamma_advance(gamma, sched, pg.spectrum.lambda2);
  }
  const StepDiagnostics last = diagnostics(state, theta, gamma);
  check(last, config.iterations);
  sum.rows.push_back(make_row(config.iterations, last, gamma));

  sum.final_max_err = last.max_err;
  sum.final_gamma = gamma_total(gamma);
  sum.invariants_held = !(sum.premise_held && (sum.invariant_violations > 0 || sum.unattacked_gain_violations > 0));
  sum.tail_slope = fit_tail_slope(sum.rows, config.iterations);

  if (!config.output.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(config.output);
    fs::create_directories(dir);
    std::ostringstream metrics;
    write_metrics_csv(metrics, sum.rows);
    write_text(dir / "metrics.csv", metrics.str());
    write_text(dir / "graph.txt", to_edge_list(graph));
    json resolved = config_to_json(config);
    // Record the seed that produced the connected graph so the file reloads without retries.
    if (!config.graph.file) resolved["graph.seed"] = pg.seed_used;
    write_text(dir / "config.json", resolved.dump(2) + "\n");
    write_text(dir / "summary.json", summary_to_json(sum).dump(2) + "\n");
  }
  return sum;
}

SweepResult sweep_resilience(const ScheduleConfig& base, const SpectralSummary& spectrum,
                             const std::vector<double>& s_values, std::int64_t horizon, bool override_validation) {
  if (horizon < 1) throw std::invalid_argument("sweep: horizon must be >= 1");
  SweepResult out;
  out.lambda2 = spectrum.lambda2;
  out.lambdaN = spectrum.lambdaN;
  out.n_agents = base.n_agents();
  for (double s : s_values) {
    ScheduleConfig cfg = base;
    cfg.s = s;
    const auto violations = validate(cfg, spectrum.lambdaN, spectrum.lambda2);
    const bool s_ok = s > 0.0 && s < 0.5;
    if (!s_ok || (!violations.empty() && !override_validation)) {
      out.skipped.push_back("s=" + format_double(s) + ": " + describe(violations));
      continue;
    }
    GammaState g = gamma_initial(cfg);
    for (std::int64_t t = 0; t < horizon; ++t) g = gamma_advance(g, cfg, spectrum.lambda2);
    out.rows.push_back({s, g.gamma1, g.gamma2, gamma_total(g)});
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const SweepRow& x, const SweepRow& y) { return x.s < y.s; });
  return out;
}

SweepResult sweep_resilience(const ExperimentConfig& base, const std::vector<double>& s_values,
                             std::int64_t horizon) {
  ProvisionedGraph pg = provision_graph(base.graph);
  ScheduleConfig sched = base.schedule;
  sched.set_n_agents(pg.graph.num_vertices());
  return sweep_resilience(sched, pg.spectrum, s_values, horizon, base.override_validation);
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "s,gamma1,gamma2,gamma_total\n";
  for (const auto& row : r.rows) {
    os << format_double(row.s) << ',' << format_double(row.gamma1) << ',' << format_double(row.gamma2) << ','
       << format_double(row.gamma_total) << '\n';
  }
}

}  // namespace siu
