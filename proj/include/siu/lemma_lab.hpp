#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "siu/error.hpp"
#include "siu/schedule.hpp"

namespace siu::lemma {

/// Constants for the scalar and coupled time-varying recursions.
///
/// r1(t) = c1 / (t+1)^delta1 and r2(t) = c2 / (t+1)^delta2. Each system uses
/// a subset of c3..c7; unused ones are ignored.
struct ScalarSystemConfig {
  double c1 = 1.0;
  double c2 = 1.0;
  double delta1 = 0.8;
  double delta2 = 0.2;
  double c3 = 1.0;
  double c4 = 1.0;
  double c5 = 1.0;
  double c6 = 1.0;
  double c7 = 1.0;
  double v0 = 1.0;
  double w0 = 1.0;
};

inline double r1(const ScalarSystemConfig& c, std::int64_t t) {
  return c.c1 / std::pow(static_cast<double>(t + 1), c.delta1);
}
inline double r2(const ScalarSystemConfig& c, std::int64_t t) {
  return c.c2 / std::pow(static_cast<double>(t + 1), c.delta2);
}

/// Subsampled trajectory: every step below `dense_until`, then
/// `samples_per_decade` log-spaced samples; t = horizon is always kept.
struct TrajectoryRecord {
  std::vector<std::int64_t> t;
  std::vector<double> v;
  std::vector<double> w;  // empty for scalar systems
  std::int64_t horizon = 0;

  bool has_w() const { return !w.empty(); }
  std::size_t size() const { return t.size(); }
};

struct SamplingOptions {
  std::int64_t dense_until = 1000;
  int samples_per_decade = 1000;
};

class DivergedError : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

class InconclusiveError : public Error {
 public:
  explicit InconclusiveError(const std::string& what) : Error(what) {}
};

/// v_{t+1} = (1 - r2(t)) v_t + r1(t).
TrajectoryRecord simulate_basic(const ScalarSystemConfig& cfg, std::int64_t horizon, SamplingOptions opts = {});

/// v_{t+1} = (1 - c3 r2(t) + c4 r1(t)) v_t + c5 r1(t).
TrajectoryRecord simulate_modified(const ScalarSystemConfig& cfg, std::int64_t horizon, SamplingOptions opts = {});

/// v_{t+1} = (1 - c3 r1(t)) v_t + c4 r1(t) w_t
/// w_{t+1} = (1 - c5 r2(t) + c6 r1(t)) w_t + c7 r1(t) v_t.
TrajectoryRecord simulate_coupled(const ScalarSystemConfig& cfg, std::int64_t horizon, SamplingOptions opts = {});

/// Coupled-system constants that reproduce the threshold recursion:
/// (v, w) = (gamma2, gamma1), r1 = alpha_t, r2 = beta_t,
/// (c3, c4, c5, c6, c7) = (1 - 2s, 1, lambda2, kappa1, kappa2), (v0, w0) = (eta, 0).
ScalarSystemConfig coupled_from_schedule(const ScheduleConfig& schedule, double lambda2);

struct DecayReport {
  double first_quarter_max = 0.0;  // max (t+1)^delta0 |x_t| over the first quarter of the tail
  double final_quarter_max = 0.0;  // same over the final quarter
  std::size_t tail_samples = 0;
  bool passed = false;
};

inline constexpr double kDefaultTailFraction = 0.5;
inline constexpr double kDefaultShrinkFactor = 0.9;
inline constexpr std::size_t kMinTailSamples = 100;

/// Finite-horizon surrogate for lim (t+1)^delta0 x_t = 0, where x_t is |v_t|,
/// or max(|v_t|, |w_t|) for coupled trajectories. Passes when the final-quarter
/// max is at most shrink_factor times the first-quarter max of the tail.
/// Throws InconclusiveError with fewer than 100 samples in the tail.
DecayReport decay_rate_report(const TrajectoryRecord& traj, double delta0,
                              double tail_fraction = kDefaultTailFraction,
                              double shrink_factor = kDefaultShrinkFactor);

bool decay_rate_check(const TrajectoryRecord& traj, double delta0, double tail_fraction = kDefaultTailFraction,
                      double shrink_factor = kDefaultShrinkFactor);

/// max_t |v_t| (and |w_t|) over the stored samples.
double sup_abs(const TrajectoryRecord& traj);

/// CSV with header "t,v,w"; w is left blank for scalar systems.
void write_csv(std::ostream& os, const TrajectoryRecord& traj);

}  // namespace siu::lemma
