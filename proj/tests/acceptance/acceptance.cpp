// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "siu/graph.hpp"
#include "siu/harness.hpp"
#include "siu/lemma_lab.hpp"
#include "siu/rng.hpp"
#include "siu/schedule.hpp"

namespace fs = std::filesystem;
namespace lm = siu::lemma;

namespace {

// Tolerances and thresholds.
constexpr double kCrit1RuntimeSeconds = 60.0;
constexpr double kCrit2FinalFraction = 0.05;   // final max_err <= 0.05 * eta
constexpr double kCrit2DropFactor = 0.1;       // max_err(T) <= 0.1 * max_err(T/10)
constexpr double kCrit3ShrinkFactor = 0.9;
constexpr double kCrit5PassScale = 0.9;
constexpr double kCrit5FailScale = 1.5;
constexpr double kSpectralTol = 1e-9;
constexpr std::int64_t kPaperHorizon = 500000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const std::string& label, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
  std::fflush(stdout);
}

void criterion(const std::string& label, bool ok, const std::string& detail) {
  report(label, ok, detail);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

siu::ExperimentConfig paper_config(int attacked, double s) {
  siu::ExperimentConfig c;
  c.graph.n = 300;
  c.graph.radius = 0.13;
  c.graph.seed = 1;
  c.schedule.a = 1.54e-4;
  c.schedule.b = 3.78e-2;
  c.schedule.tau1 = 0.15;
  c.schedule.tau2 = 0.001;
  c.schedule.s = s;
  c.schedule.eta = 100.0;
  c.attack.size = attacked;
  c.attack.mode = siu::AttackMode::kFixed;
  c.attack.strategy = "negation";
  c.attack.seed = 11;
  c.theta.dim = 3;
  c.theta.seed = 2;
  c.iterations = kPaperHorizon;
  c.log_stride = 500;
  return c;
}

// b = 1/lambdaN and a = b lambda2 / (2 kappa1): the threshold recursion
// contracts from t = 0 instead of growing through a long transient.
void tune_schedule(siu::ExperimentConfig& c) {
  const auto pg = siu::provision_graph(c.graph);
  c.schedule.b = 1.0 / pg.spectrum.lambdaN;
  c.schedule.a = 0.5 * c.schedule.b * pg.spectrum.lambda2 / (1.0 + std::sqrt(static_cast<double>(c.graph.n)));
}

void criterion1() {
  const auto start = Clock::now();
  int runs = 0;
  std::int64_t violations = 0;
  std::int64_t gain_violations = 0;
  bool premise = true;
  std::string error;
  const std::vector<std::string> strategies = {"negation", "random-bounded"};
  try {
    for (int k = 0; k < 20; ++k) {
      siu::ExperimentConfig c;
      const bool big = k % 2 == 1;
      const double s = (k / 2) % 2 == 0 ? 0.2 : 0.4;
      c.graph.n = big ? 50 : 20;
      c.graph.radius = big ? 0.3 : 0.4;
      c.graph.seed = 100 + k;
      // Largest S with S / N < s.
      c.attack.size = static_cast<int>(std::ceil(s * c.graph.n)) - 1;
      c.attack.mode = (k / 4) % 2 == 0 ? siu::AttackMode::kFixed : siu::AttackMode::kTimeVarying;
      c.attack.strategy = strategies[(k / 8 + k) % 2];
      c.attack.magnitude = 50.0;
      c.attack.seed = 7 + k;
      c.schedule.s = s;
      c.schedule.eta = 10.0;
      c.theta.dim = 3;
      c.theta.seed = 31 + k;
      c.iterations = 20000;
      c.log_stride = 100;
      tune_schedule(c);
      const auto summary = siu::run(c);
      ++runs;
      violations += summary.invariant_violations;
      gain_violations += summary.unattacked_gain_violations;
      premise = premise && summary.premise_held;
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double elapsed = seconds_since(start);
  const bool ok = error.empty() && runs == 20 && premise && violations == 0 && elapsed < kCrit1RuntimeSeconds;
  std::ostringstream d;
  d << runs << "/20 runs, invariant violations (every step)=" << violations
    << ", unattacked gains != 1: " << gain_violations << ", premise " << (premise ? "held" : "broken") << ", "
    << fmt("%.1f", elapsed) << " s (limit " << kCrit1RuntimeSeconds << " s)";
  if (!error.empty()) d << ", error: " << error;
  criterion("criterion 1 (invariant suite)", ok, d.str());
}

struct PaperRuns {
  bool ok = false;
  std::string error;
  siu::RunSummary low;   // S = 60, s = 0.201
  siu::RunSummary high;  // S = 120, s = 0.401
};

PaperRuns paper_runs() {
  PaperRuns r;
  try {
    r.low = siu::run(paper_config(60, 0.201));
    r.high = siu::run(paper_config(120, 0.401));
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

double err_at(const siu::RunSummary& s, std::int64_t t) {
  for (const auto& row : s.rows)
    if (row.t == t) return row.max_err;
  return std::nan("");
}

void criterion2(const PaperRuns& p) {
  if (!p.ok) {
    criterion("criterion 2 (convergence, N=300)", false, "run failed: " + p.error);
    return;
  }
  const double eta = 100.0;
  bool ok = true;
  std::ostringstream d;
  for (const auto* s : {&p.low, &p.high}) {
    const double final_err = err_at(*s, kPaperHorizon);
    const double tenth_err = err_at(*s, kPaperHorizon / 10);
    const bool final_ok = final_err <= kCrit2FinalFraction * eta;
    const bool drop_ok = final_err <= kCrit2DropFactor * tenth_err;
    ok = ok && final_ok && drop_ok && s->invariants_held;
    d << "S=" << s->max_attacked << ": max_err(T)=" << fmt("%.4g", final_err)
      << " max_err(T/10)=" << fmt("%.4g", tenth_err) << " ratio=" << fmt("%.3g", final_err / tenth_err)
      << (s->invariants_held ? "" : " invariants broken") << "; ";
  }
  const bool order_ok = p.low.final_max_err <= p.high.final_max_err;
  ok = ok && order_ok;
  d << "lower s converges faster: " << (order_ok ? "yes" : "no") << fmt(" (lambda2=%.4g", p.low.lambda2)
    << fmt(", lambdaN=%.4g)", p.low.lambdaN);
  criterion("criterion 2 (convergence, N=300)", ok, d.str());
}

void criterion3(const PaperRuns& p) {
  if (!p.ok) {
    criterion("criterion 3 (rate tail)", false, "run failed: " + p.error);
    return;
  }
  const double delta0 = 0.5 * (0.15 - 0.001);
  bool ok = true;
  std::ostringstream d;
  d << "delta0=" << delta0 << "; ";
  for (const auto* s : {&p.low, &p.high}) {
    lm::TrajectoryRecord tr;
    tr.horizon = s->iterations;
    for (const auto& row : s->rows) {
      tr.t.push_back(row.t);
      tr.v.push_back(row.max_err);
    }
    try {
      const auto rep = lm::decay_rate_report(tr, delta0, lm::kDefaultTailFraction, kCrit3ShrinkFactor);
      ok = ok && rep.passed;
      d << "S=" << s->max_attacked << ": final/first quarter=" << fmt("%.4g", rep.final_quarter_max / rep.first_quarter_max)
        << " over " << rep.tail_samples << " samples; ";
    } catch (const std::exception& e) {
      ok = false;
      d << "S=" << s->max_attacked << ": " << e.what() << "; ";
    }
  }
  criterion("criterion 3 (rate tail)", ok, d.str());
}

void criterion4() {
  try {
    auto base = paper_config(0, 0.2);
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.05 + 0.4 * i / 9.0);
    const auto result = siu::sweep_resilience(base, grid, kPaperHorizon);
    bool ok = result.rows.size() == 10 && result.skipped.empty();
    for (std::size_t i = 1; i < result.rows.size(); ++i)
      ok = ok && result.rows[i].gamma_total >= result.rows[i - 1].gamma_total;
    std::ostringstream d;
    d << result.rows.size() << " values, gamma_T from " << fmt("%.4g", result.rows.front().gamma_total) << " (s=0.05) to "
      << fmt("%.4g", result.rows.back().gamma_total) << " (s=0.45), nondecreasing: " << (ok ? "yes" : "no");
    criterion("criterion 4 (resilience trade-off)", ok, d.str());
  } catch (const std::exception& e) {
    criterion("criterion 4 (resilience trade-off)", false, e.what());
  }
}

struct DecayTally {
  int pass_at_low = 0;
  int fail_at_high = 0;
  double worst_low_ratio = 0.0;
};

DecayTally decay_tally(const std::function<lm::TrajectoryRecord(const lm::ScalarSystemConfig&)>& sim,
                       std::uint64_t seed, bool coupled) {
  DecayTally tally;
  siu::Rng rng = siu::make_rng({seed});
  for (int k = 0; k < 10; ++k) {
    lm::ScalarSystemConfig c;
    c.delta2 = 0.05 + 0.4 * siu::uniform01(rng);
    c.delta1 = c.delta2 + 0.1 + (0.95 - c.delta2 - 0.1) * siu::uniform01(rng);
    c.c1 = 0.1 + 0.9 * siu::uniform01(rng);
    c.c2 = 0.1 + 0.9 * siu::uniform01(rng);
    c.c3 = 0.5 + 0.5 * siu::uniform01(rng);
    c.c4 = 0.1 + 0.9 * siu::uniform01(rng);
    c.c5 = 0.5 + 0.5 * siu::uniform01(rng);
    c.c6 = 0.1 + 0.9 * siu::uniform01(rng);
    c.c7 = 0.1 + 0.9 * siu::uniform01(rng);
    c.v0 = 1.0 + 9.0 * siu::uniform01(rng);
    c.w0 = coupled ? 1.0 + 9.0 * siu::uniform01(rng) : 0.0;
    // Without this the transient growth can exceed double range before
    // r2 dominates r1: cap the coupling so the iteration matrix is a
    // max-norm contraction from t = 0 (c4 <= c3, (c6 + c7) c1 <= c5 c2).
    if (coupled) {
      c.c4 = std::min(c.c4, c.c3);
      const double excess = (c.c6 + c.c7) * c.c1 / (c.c5 * c.c2);
      if (excess > 1.0) {
        c.c6 /= excess;
        c.c7 /= excess;
      }
    }
    const auto tr = sim(c);
    const double gap = c.delta1 - c.delta2;
    const auto low = lm::decay_rate_report(tr, kCrit5PassScale * gap);
    const auto high = lm::decay_rate_report(tr, kCrit5FailScale * gap);
    if (low.passed) ++tally.pass_at_low;
    if (!high.passed) ++tally.fail_at_high;
    tally.worst_low_ratio = std::max(tally.worst_low_ratio, low.final_quarter_max / low.first_quarter_max);
  }
  return tally;
}

void criterion5() {
  const std::int64_t T = 1000000;
  bool all = true;

  // 5a: basic system with delta1 = delta2 and c2 <= 1 never leaves [0, max(v0, c1/c2)].
  {
    siu::Rng rng = siu::make_rng({505});
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      lm::ScalarSystemConfig c;
      c.delta1 = c.delta2 = 0.05 + 0.9 * siu::uniform01(rng);
      c.c1 = 0.1 + 4.9 * siu::uniform01(rng);
      c.c2 = 0.1 + 0.9 * siu::uniform01(rng);
      c.v0 = 10.0 * siu::uniform01(rng);
      const auto tr = lm::simulate_basic(c, 100000);
      const double bound = std::max(c.v0, c.c1 / c.c2);
      const double sup = lm::sup_abs(tr);
      ok = ok && std::isfinite(sup) && sup <= bound * (1.0 + 1e-12);
      worst = std::max(worst, sup / bound);
    }
    all = all && ok;
    report("criterion 5a (basic bounded, T=1e5)", ok, "10 configs, max sup|v| / max(v0, c1/c2) = " + fmt("%.6g", worst));
  }

  // 5b/5c: decay discrimination.
  for (int which = 0; which < 2; ++which) {
    const bool coupled = which == 1;
    const auto tally = decay_tally(
        [&](const lm::ScalarSystemConfig& c) {
          return coupled ? lm::simulate_coupled(c, T) : lm::simulate_modified(c, T);
        },
        coupled ? 707 : 606, coupled);
    const bool pass_ok = tally.pass_at_low == 10;
    const bool fail_ok = tally.fail_at_high == 10;
    all = all && pass_ok && fail_ok;
    const std::string name = coupled ? "coupled" : "modified";
    const std::string tag = coupled ? "5c" : "5b";
    report("criterion " + tag + " (" + name + " passes at 0.9*gap)", pass_ok,
           std::to_string(tally.pass_at_low) + "/10 passed, worst final/first quarter ratio " +
               fmt("%.4g", tally.worst_low_ratio) + " vs shrink " + fmt("%.2g", lm::kDefaultShrinkFactor));
    report("criterion " + tag + " (" + name + " fails at 1.5*gap)", fail_ok,
           std::to_string(tally.fail_at_high) + "/10 failed");
  }

  // 5d: threshold recursion and the mapped coupled system agree bit for bit.
  {
    siu::ScheduleConfig sc;
    sc.set_n_agents(300);
    const double lambda2 = 0.1337;
    const auto mapped = lm::coupled_from_schedule(sc, lambda2);
    lm::SamplingOptions dense;
    dense.dense_until = 10001;
    const auto tr = lm::simulate_coupled(mapped, 10000, dense);
    auto g = siu::gamma_initial(sc);
    bool ok = tr.size() == 10001;
    std::int64_t mismatches = 0;
    for (std::size_t i = 0; ok && i < tr.size(); ++i) {
      if (tr.t[i] != g.t || tr.v[i] != g.gamma2 || tr.w[i] != g.gamma1) ++mismatches;
      if (i + 1 < tr.size()) g = siu::gamma_advance(g, sc, lambda2);
    }
    ok = ok && mismatches == 0;
    all = all && ok;
    report("criterion 5d (gamma recursion == coupled system)", ok,
           std::to_string(tr.size()) + " states compared, " + std::to_string(mismatches) + " mismatches");
  }
  if (!all) ++failures;
  std::printf("%s criterion 5 (lemma oracles)\n", all ? "PASS" : "FAIL");
}

void criterion6() {
  bool ok = true;
  std::ostringstream d;
  const siu::Graph p3(3, {{0, 1}, {1, 2}});
  const siu::Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto sp = siu::spectral_bounds(siu::laplacian(p3));
  const auto sk = siu::spectral_bounds(siu::laplacian(k4));
  const double e3 = std::max(std::abs(sp.lambda2 - 1.0), std::abs(sp.lambdaN - 3.0));
  const double e4 = std::max(std::abs(sk.lambda2 - 4.0), std::abs(sk.lambdaN - 4.0));
  ok = e3 <= kSpectralTol && e4 <= kSpectralTol;
  d << "P3 err " << fmt("%.2g", e3) << ", K4 err " << fmt("%.2g", e4);

  siu::Rng rng = siu::make_rng({606060});
  int agree = 0;
  int connected = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + static_cast<int>(siu::uniform01(rng) * 19.0);
    const double radius = 0.1 + 0.6 * siu::uniform01(rng);
    const auto g = siu::random_geometric(n, radius, 9000 + k);
    const bool conn = siu::is_connected(g);
    const auto s = siu::spectral_bounds(siu::laplacian(g));
    if (conn == (s.lambda2 > kSpectralTol)) ++agree;
    if (conn) ++connected;
  }
  ok = ok && agree == 100;
  d << "; connectivity <=> lambda2 > " << kSpectralTol << " on " << agree << "/100 graphs (" << connected
    << " connected)";
  criterion("criterion 6 (spectral correctness)", ok, d.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion7() {
  const fs::path base = fs::temp_directory_path() / "siu_acceptance_determinism";
  fs::remove_all(base);
  bool ok = true;
  std::ostringstream d;
  int compared = 0;
  try {
    for (int k = 0; k < 4; ++k) {
      siu::ExperimentConfig c;
      c.graph.n = 50;
      c.graph.radius = 0.3;
      c.graph.seed = 40 + k;
      c.schedule.s = 0.4;
      c.schedule.eta = 10.0;
      c.attack.size = 19;
      c.attack.mode = k % 2 == 0 ? siu::AttackMode::kFixed : siu::AttackMode::kTimeVarying;
      c.attack.strategy = k < 2 ? "negation" : "random-bounded";
      c.attack.magnitude = 30.0;
      c.attack.seed = 3 + k;
      c.iterations = 5000;
      c.log_stride = 50;
      tune_schedule(c);
      c.output = (base / ("a" + std::to_string(k))).string();
      siu::run(c);
      c.output = (base / ("b" + std::to_string(k))).string();
      siu::run(c);
      const auto first = slurp(base / ("a" + std::to_string(k)) / "metrics.csv");
      const auto second = slurp(base / ("b" + std::to_string(k)) / "metrics.csv");
      ok = ok && !first.empty() && first == second;
      ++compared;
    }
  } catch (const std::exception& e) {
    ok = false;
    d << "error: " << e.what() << "; ";
  }
  fs::remove_all(base);
  d << compared << " configurations re-run, metrics.csv byte-identical: " << (ok ? "yes" : "no");
  criterion("criterion 7 (determinism)", ok, d.str());
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion1();
  const auto paper = paper_runs();
  criterion2(paper);
  criterion3(paper);
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::printf("%d criteria failed, %.1f s total\n", failures, seconds_since(start));
  return failures;
}
