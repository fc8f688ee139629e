#include "siu/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace siu {

namespace {

constexpr std::uint64_t kSetStream = 0x5e7a11ULL;
constexpr std::uint64_t kRowStream = 0xa77acULL;

}  // namespace

AttackStrategy AttackStrategy::none() { return {"none", {}, false}; }

AttackStrategy AttackStrategy::negation() {
  return {"negation", [](const Eigen::VectorXd& theta, int, std::int64_t, Rng&) -> Eigen::VectorXd { return -theta; },
          false};
}

AttackStrategy AttackStrategy::constant_offset(Eigen::VectorXd offset) {
  return {"constant-offset",
          [offset = std::move(offset)](const Eigen::VectorXd& theta, int, std::int64_t, Rng&) -> Eigen::VectorXd {
            if (offset.size() != theta.size()) {
              throw std::invalid_argument("constant-offset: offset dimension does not match theta");
            }
            return theta + offset;
          },
          false};
}

AttackStrategy AttackStrategy::random_bounded(double magnitude) {
  if (!(magnitude >= 0.0)) throw std::invalid_argument("random-bounded: magnitude must be >= 0");
  return {"random-bounded", [magnitude](const Eigen::VectorXd& theta, int, std::int64_t, Rng& rng) -> Eigen::VectorXd {
            const Eigen::Index m = theta.size();
            std::normal_distribution<double> normal;
            Eigen::VectorXd dir(m);
            double norm = 0.0;
            while (norm == 0.0) {
              for (Eigen::Index i = 0; i < m; ++i) dir(i) = normal(rng);
              norm = dir.norm();
            }
            const double r = magnitude * std::pow(uniform01(rng), 1.0 / static_cast<double>(m));
            Eigen::VectorXd u = dir * (r / norm);
            // Guard the ball boundary against rounding in the rescale.
            const double un = u.norm();
            if (un > magnitude) u *= magnitude / un;
            return theta + u;
          }};
}

AttackStrategy AttackStrategy::custom(std::string name, CorruptFn fn) { return {std::move(name), std::move(fn)}; }

AttackMode parse_attack_mode(const std::string& text) {
  if (text == "fixed") return AttackMode::kFixed;
  if (text == "time-varying" || text == "time_varying" || text == "varying") return AttackMode::kTimeVarying;
  throw std::invalid_argument("unknown attack mode '" + text + "' (expected fixed | time-varying)");
}

std::string to_string(AttackMode mode) { return mode == AttackMode::kFixed ? "fixed" : "time-varying"; }

std::vector<int> attack_set(const AttackPlan& plan, std::int64_t t, int n_agents) {
  if (plan.size < 0) throw std::invalid_argument("attack: size must be >= 0");
  if (plan.size >= n_agents) {
    throw std::invalid_argument("attack: size S=" + std::to_string(plan.size) + " must be < N=" +
                                std::to_string(n_agents));
  }
  if (plan.size == 0) return {};
  const std::uint64_t key = plan.mode == AttackMode::kFixed ? 0 : static_cast<std::uint64_t>(t);
  Rng rng = make_rng({plan.seed, key, kSetStream});
  std::vector<int> idx(static_cast<std::size_t>(n_agents));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < plan.size; ++i) {
    std::uniform_int_distribution<int> pick(i, n_agents - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(plan.size));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Measurement measure_with_set(const Eigen::VectorXd& theta_star, const AttackPlan& plan, std::int64_t t,
                             int n_agents, const std::vector<int>& set) {
  const Eigen::Index m = theta_star.size();
  Measurement out;
  out.values.resize(n_agents, m);
  out.values.rowwise() = theta_star.transpose();
  out.attacked.assign(static_cast<std::size_t>(n_agents), false);
  if (!plan.strategy.active()) return out;
  thread_local Rng unused;  // handed to deterministic strategies, never drawn from
  for (int n : set) {
    Eigen::VectorXd y;
    if (plan.strategy.stochastic) {
      Rng rng = make_rng({plan.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(n), kRowStream});
      y = plan.strategy.corrupt(theta_star, n, t, rng);
    } else {
      y = plan.strategy.corrupt(theta_star, n, t, unused);
    }
    if (y.size() != m) throw std::invalid_argument("attack strategy returned a vector of the wrong dimension");
    out.values.row(n) = y.transpose();
    out.attacked[static_cast<std::size_t>(n)] = true;
  }
  return out;
}

Measurement measure(const Eigen::VectorXd& theta_star, const AttackPlan& plan, std::int64_t t, int n_agents) {
  return measure_with_set(theta_star, plan, t, n_agents, attack_set(plan, t, n_agents));
}

Attacker::Attacker(AttackPlan plan, int n_agents) : plan_(std::move(plan)), n_agents_(n_agents) {
  // Validate S < N up front.
  cached_ = attack_set(plan_, 0, n_agents_);
  have_fixed_ = plan_.mode == AttackMode::kFixed;
}

const std::vector<int>& Attacker::set_at(std::int64_t t) {
  if (!have_fixed_) cached_ = attack_set(plan_, t, n_agents_);
  return cached_;
}

Measurement Attacker::measure(const Eigen::VectorXd& theta_star, std::int64_t t) {
  return measure_with_set(theta_star, plan_, t, n_agents_, set_at(t));
}

}  // namespace siu
