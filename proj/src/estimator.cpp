#include "siu/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace siu {

EstimatorState initial_state(int n_agents, int dim) {
  if (n_agents < 1 || dim < 1) throw std::invalid_argument("estimator: need at least one agent and dimension");
  return {RowMatrix::Zero(n_agents, dim), 0};
}

double gain(std::span<const double> y, std::span<const double> x, double gamma) {
  if (y.size() != x.size()) throw std::invalid_argument("gain: dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - x[i];
    sq += d * d;
  }
  const double norm = std::sqrt(sq);
  if (norm <= gamma) return 1.0;
  return gamma / norm;
}

double gain(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double gamma) {
  return gain(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
              std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), gamma);
}

namespace {

void check_dims(const EstimatorState& state, const Graph& g, const Measurement& meas) {
  if (state.x.rows() != g.num_vertices()) throw std::invalid_argument("siu_step: state rows != graph vertex count");
  if (meas.values.rows() != state.x.rows() || meas.values.cols() != state.x.cols()) {
    throw std::invalid_argument("siu_step: measurement shape does not match state");
  }
}

}  // namespace

double update_agent(const EstimatorState& state, const Graph& g, const Measurement& meas, int agent, double alpha,
                    double beta, double gamma, std::span<double> out) {
  const std::size_t m = static_cast<std::size_t>(state.x.cols());
  if (out.size() != m) throw std::invalid_argument("update_agent: output row has wrong length");
  const double* xn = state.x.data() + static_cast<std::size_t>(agent) * m;
  const double* yn = meas.values.data() + static_cast<std::size_t>(agent) * m;

  const double k = gain(std::span<const double>(yn, m), std::span<const double>(xn, m), gamma);
  for (std::size_t j = 0; j < m; ++j) {
    double consensus = 0.0;
    for (int l : g.neighbors(agent)) consensus += xn[j] - state.x.data()[static_cast<std::size_t>(l) * m + j];
    out[j] = xn[j] - beta * consensus + alpha * k * (yn[j] - xn[j]);
  }
  return k;
}

EstimatorState siu_step(const EstimatorState& state, const Graph& g, const Measurement& meas, double alpha,
                        double beta, double gamma, std::span<double> gains_out) {
  check_dims(state, g, meas);
  const int n = state.num_agents();
  const std::size_t m = static_cast<std::size_t>(state.dim());
  if (!gains_out.empty() && gains_out.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("siu_step: gains buffer must have one entry per agent");
  }
  EstimatorState next{RowMatrix(n, state.dim()), state.t + 1};
  for (int a = 0; a < n; ++a) {
    std::span<double> row(next.x.data() + static_cast<std::size_t>(a) * m, m);
    const double k = update_agent(state, g, meas, a, alpha, beta, gamma, row);
    if (!gains_out.empty()) gains_out[static_cast<std::size_t>(a)] = k;
  }
  return next;
}

StepDiagnostics diagnostics(const EstimatorState& state, const Eigen::VectorXd& theta_star, const GammaState& gamma,
                            std::span<const double> gains) {
  const Eigen::Index n = state.x.rows();
  const Eigen::Index m = state.x.cols();
  if (theta_star.size() != m) throw std::invalid_argument("diagnostics: theta dimension mismatch");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) mean += state.x.row(i).transpose();
  mean /= static_cast<double>(n);

  StepDiagnostics d;
  double dev_sq = 0.0;
  double err_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    dev_sq += (state.x.row(i).transpose() - mean).squaredNorm();
    const double err = (state.x.row(i).transpose() - theta_star).norm();
    err_sum += err;
    d.max_err = std::max(d.max_err, err);
  }
  d.V = std::sqrt(dev_sq);
  d.W = (mean - theta_star).norm();
  d.mean_err = err_sum / static_cast<double>(n);
  d.gains.assign(gains.begin(), gains.end());
  d.v_ok = d.V <= gamma.gamma1;
  d.w_ok = d.W <= gamma.gamma2;
  d.err_ok = d.max_err <= gamma_total(gamma);
  return d;
}

}  // namespace siu
