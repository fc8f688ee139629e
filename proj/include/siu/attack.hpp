#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "siu/rng.hpp"

namespace siu {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class AttackMode { kFixed, kTimeVarying };

/// Replaces the measurement of an attacked agent: (theta*, agent, t, rng) -> y_n(t).
/// The adversary may read theta* (omniscient attacker).
using CorruptFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, int agent, std::int64_t t, Rng& rng)>;

struct AttackStrategy {
  std::string name = "none";
  CorruptFn corrupt;  // empty for "none"
  bool stochastic = true;  // false: corrupt ignores its Rng, so no per-row stream is seeded

  bool active() const { return static_cast<bool>(corrupt); }

  static AttackStrategy none();
  /// y = -theta*.
  static AttackStrategy negation();
  /// y = theta* + offset.
  static AttackStrategy constant_offset(Eigen::VectorXd offset);
  /// y = theta* + u, u uniform in the l2 ball of the given radius.
  static AttackStrategy random_bounded(double magnitude);
  static AttackStrategy custom(std::string name, CorruptFn fn);
};

struct AttackPlan {
  int size = 0;  // S: agents attacked per step
  AttackMode mode = AttackMode::kFixed;
  AttackStrategy strategy = AttackStrategy::none();
  std::uint64_t seed = 0;
};

AttackMode parse_attack_mode(const std::string& text);
std::string to_string(AttackMode mode);

struct Measurement {
  RowMatrix values;            // N x M, row n = y_n(t)
  std::vector<bool> attacked;  // attack intent; see attack_set
};

/// S agents sampled uniformly without replacement (seeded Fisher-Yates prefix),
/// sorted ascending. Fixed mode ignores t. Throws std::invalid_argument when
/// S >= n_agents or S < 0.
std::vector<int> attack_set(const AttackPlan& plan, std::int64_t t, int n_agents);

/// Measurements at iteration t. Rows outside the attack set equal theta*.
Measurement measure(const Eigen::VectorXd& theta_star, const AttackPlan& plan, std::int64_t t, int n_agents);

/// Same as measure() but takes the attack set precomputed (used by the run loop).
Measurement measure_with_set(const Eigen::VectorXd& theta_star, const AttackPlan& plan, std::int64_t t,
                             int n_agents, const std::vector<int>& set);

/// Caches the fixed-mode set across iterations.
class Attacker {
 public:
  Attacker(AttackPlan plan, int n_agents);

  const std::vector<int>& set_at(std::int64_t t);
  Measurement measure(const Eigen::VectorXd& theta_star, std::int64_t t);
  const AttackPlan& plan() const noexcept { return plan_; }

 private:
  AttackPlan plan_;
  int n_agents_;
  std::vector<int> cached_;
  bool have_fixed_ = false;
};

}  // namespace siu
