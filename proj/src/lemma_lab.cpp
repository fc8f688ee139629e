#include "siu/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "siu/format.hpp"

namespace siu::lemma {

namespace {

class Sampler {
 public:
  Sampler(std::int64_t horizon, SamplingOptions opts)
      : horizon_(horizon), opts_(opts), factor_(std::pow(10.0, 1.0 / std::max(1, opts.samples_per_decade))) {}

  bool keep(std::int64_t t) {
    if (t == horizon_) return true;
    if (t < opts_.dense_until) return true;
    if (t < next_) return false;
    next_ = std::max<std::int64_t>(t + 1, static_cast<std::int64_t>(std::ceil(static_cast<double>(t) * factor_)));
    return true;
  }

 private:
  std::int64_t horizon_;
  SamplingOptions opts_;
  double factor_;
  std::int64_t next_ = 0;
};

void check_common(const ScalarSystemConfig& c, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("lemma: horizon must be >= 1");
  if (!(c.delta1 > 0.0 && c.delta1 < 1.0 && c.delta2 > 0.0 && c.delta2 < 1.0)) {
    throw std::invalid_argument("lemma: decay exponents must lie in (0, 1)");
  }
  for (double k : {c.c1, c.c2, c.c3, c.c4, c.c5, c.c6, c.c7}) {
    if (!(k >= 0.0)) throw std::invalid_argument("lemma: rate and coupling constants must be non-negative");
  }
}

[[noreturn]] void diverged(std::int64_t t) {
  throw DivergedError("lemma: trajectory diverged (non-finite value) at t=" + std::to_string(t));
}

template <typename Step>
TrajectoryRecord run_scalar(double v0, std::int64_t horizon, SamplingOptions opts, Step step) {
  TrajectoryRecord rec;
  rec.horizon = horizon;
  Sampler sampler(horizon, opts);
  double v = v0;
  if (sampler.keep(0)) {
    rec.t.push_back(0);
    rec.v.push_back(v);
  }
  for (std::int64_t t = 0; t < horizon; ++t) {
    v = step(t, v);
    if (!std::isfinite(v)) diverged(t + 1);
    if (sampler.keep(t + 1)) {
      rec.t.push_back(t + 1);
      rec.v.push_back(v);
    }
  }
  return rec;
}

}  // namespace

TrajectoryRecord simulate_basic(const ScalarSystemConfig& c, std::int64_t horizon, SamplingOptions opts) {
  check_common(c, horizon);
  if (c.delta2 > c.delta1) throw std::invalid_argument("simulate_basic: requires delta2 <= delta1");
  return run_scalar(c.v0, horizon, opts,
                    [&](std::int64_t t, double v) { return (1.0 - r2(c, t)) * v + r1(c, t); });
}

TrajectoryRecord simulate_modified(const ScalarSystemConfig& c, std::int64_t horizon, SamplingOptions opts) {
  check_common(c, horizon);
  if (!(c.delta2 < c.delta1)) throw std::invalid_argument("simulate_modified: requires delta2 < delta1");
  return run_scalar(c.v0, horizon, opts, [&](std::int64_t t, double v) {
    const double a = r1(c, t);
    const double b = r2(c, t);
    return (1.0 - c.c3 * b + c.c4 * a) * v + c.c5 * a;
  });
}

TrajectoryRecord simulate_coupled(const ScalarSystemConfig& c, std::int64_t horizon, SamplingOptions opts) {
  check_common(c, horizon);
  if (!(c.delta2 < c.delta1)) throw std::invalid_argument("simulate_coupled: requires delta2 < delta1");
  TrajectoryRecord rec;
  rec.horizon = horizon;
  Sampler sampler(horizon, opts);
  double v = c.v0;
  double w = c.w0;
  auto record = [&](std::int64_t t) {
    rec.t.push_back(t);
    rec.v.push_back(v);
    rec.w.push_back(w);
  };
  if (sampler.keep(0)) record(0);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const double a = r1(c, t);
    const double b = r2(c, t);
    // Same operand order as gamma_advance (see coupled_from_schedule).
    const double w_next = (1.0 - c.c5 * b + c.c6 * a) * w + c.c7 * a * v;
    const double v_next = (1.0 - c.c3 * a) * v + c.c4 * a * w;
    v = v_next;
    w = w_next;
    if (!std::isfinite(v) || !std::isfinite(w)) diverged(t + 1);
    if (sampler.keep(t + 1)) record(t + 1);
  }
  return rec;
}

ScalarSystemConfig coupled_from_schedule(const ScheduleConfig& s, double lambda2) {
  ScalarSystemConfig c;
  c.c1 = s.a;
  c.delta1 = s.tau1;
  c.c2 = s.b;
  c.delta2 = s.tau2;
  c.c3 = 1.0 - 2.0 * s.s;
  c.c4 = 1.0;
  c.c5 = lambda2;
  c.c6 = s.kappa1();
  c.c7 = s.kappa2();
  c.v0 = s.eta;
  c.w0 = 0.0;
  return c;
}

DecayReport decay_rate_report(const TrajectoryRecord& traj, double delta0, double tail_fraction,
                              double shrink_factor) {
  if (!(delta0 >= 0.0)) throw std::invalid_argument("decay_rate_check: delta0 must be >= 0");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw std::invalid_argument("decay_rate_check: tail_fraction must lie in (0, 1)");
  }
  const double horizon = static_cast<double>(traj.horizon);
  const double tail_start = (1.0 - tail_fraction) * horizon;
  const double quarter = 0.25 * (horizon - tail_start);
  const double first_end = tail_start + quarter;
  const double final_start = horizon - quarter;

  DecayReport rep;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = static_cast<double>(traj.t[i]);
    if (t < tail_start) continue;
    ++rep.tail_samples;
    double mag = std::abs(traj.v[i]);
    if (traj.has_w()) mag = std::max(mag, std::abs(traj.w[i]));
    const double scaled = std::pow(t + 1.0, delta0) * mag;
    if (t <= first_end) rep.first_quarter_max = std::max(rep.first_quarter_max, scaled);
    if (t >= final_start) rep.final_quarter_max = std::max(rep.final_quarter_max, scaled);
  }
  if (rep.tail_samples < kMinTailSamples) {
    throw InconclusiveError("decay_rate_check: only " + std::to_string(rep.tail_samples) +
                            " samples in the tail (need " + std::to_string(kMinTailSamples) + ")");
  }
  rep.passed = rep.final_quarter_max <= shrink_factor * rep.first_quarter_max;
  return rep;
}

bool decay_rate_check(const TrajectoryRecord& traj, double delta0, double tail_fraction, double shrink_factor) {
  return decay_rate_report(traj, delta0, tail_fraction, shrink_factor).passed;
}

double sup_abs(const TrajectoryRecord& traj) {
  double m = 0.0;
  for (double x : traj.v) m = std::max(m, std::abs(x));
  for (double x : traj.w) m = std::max(m, std::abs(x));
  return m;
}

void write_csv(std::ostream& os, const TrajectoryRecord& traj) {
  os << "t,v,w\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << traj.t[i] << ',' << format_double(traj.v[i]) << ',';
    if (traj.has_w()) os << format_double(traj.w[i]);
    os << '\n';
  }
}

}  // namespace siu::lemma
