#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "siu/attack.hpp"
#include "siu/graph.hpp"
#include "siu/schedule.hpp"

namespace siu {

struct EstimatorState {
  RowMatrix x;  // N x M, row n = x_n(t)
  std::int64_t t = 0;

  int num_agents() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Every agent starts at the origin.
EstimatorState initial_state(int n_agents, int dim);

/// Saturation gain: 1 if ||y - x|| <= gamma, else gamma / ||y - x||.
/// With gamma = 0 and a nonzero innovation the gain is 0.
double gain(std::span<const double> y, std::span<const double> x, double gamma);
double gain(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double gamma);

/// Next estimate of one agent, written to `out` (length M). Reads only `state`.
/// Returns the gain used.
double update_agent(const EstimatorState& state, const Graph& g, const Measurement& meas, int agent, double alpha,
                    double beta, double gamma, std::span<double> out);

/// One synchronous consensus + saturated-innovation step over all agents.
/// If `gains_out` is non-empty it must have N entries and receives K_n(t).
/// Throws std::invalid_argument on dimension mismatch.
EstimatorState siu_step(const EstimatorState& state, const Graph& g, const Measurement& meas, double alpha,
                        double beta, double gamma, std::span<double> gains_out = {});

struct StepDiagnostics {
  double V = 0.0;         // ||x - 1 (x) xbar||_2
  double W = 0.0;         // ||xbar - theta*||_2
  double max_err = 0.0;   // max_n ||x_n - theta*||_2
  double mean_err = 0.0;  // mean_n ||x_n - theta*||_2
  std::vector<double> gains;
  bool v_ok = true;    // V <= gamma1
  bool w_ok = true;    // W <= gamma2
  bool err_ok = true;  // max_err <= gamma1 + gamma2

  bool all_ok() const { return v_ok && w_ok && err_ok; }
};

StepDiagnostics diagnostics(const EstimatorState& state, const Eigen::VectorXd& theta_star, const GammaState& gamma,
                            std::span<const double> gains = {});

}  // namespace siu
