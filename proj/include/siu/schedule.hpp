#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace siu {

/// Step-size and threshold parameters.
///
/// alpha_t = a / (t+1)^tau1 scales the innovation, beta_t = b / (t+1)^tau2
/// the consensus term. `s` is the resilience index and `eta` bounds the
/// parameter norm. kappa1 = 1 + sqrt(N) and kappa2 = 2 sqrt(N) are derived
/// from `n_agents` and are not settable.
class ScheduleConfig {
 public:
  double a = 1.54e-4;
  double b = 3.78e-2;
  double tau1 = 0.15;
  double tau2 = 0.001;
  double s = 0.201;
  double eta = 100.0;

  ScheduleConfig() = default;
  ScheduleConfig(double a, double b, double tau1, double tau2, double s, double eta, int n_agents);

  int n_agents() const noexcept { return n_agents_; }
  void set_n_agents(int n);
  double kappa1() const noexcept { return kappa1_; }
  double kappa2() const noexcept { return kappa2_; }

 private:
  int n_agents_ = 1;
  double kappa1_ = 2.0;
  double kappa2_ = 2.0;
};

struct Violation {
  std::string constraint;  // e.g. "s < 1/2"
  double value = 0.0;      // offending value
  std::string message;
};

/// Empty iff every parameter-selection constraint holds.
std::vector<Violation> validate(const ScheduleConfig& config, double lambdaN, double lambda2);

std::string describe(const std::vector<Violation>& violations);

double alpha(const ScheduleConfig& config, std::int64_t t);
double beta(const ScheduleConfig& config, std::int64_t t);

struct GammaState {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::int64_t t = 0;
};

/// gamma1_0 = 0, gamma2_0 = eta.
GammaState gamma_initial(const ScheduleConfig& config);

/// One step of the coupled threshold recursion. Throws InvariantViolation if
/// either component turns negative.
GammaState gamma_advance(const GammaState& state, const ScheduleConfig& config, double lambda2);

inline double gamma_total(const GammaState& state) { return state.gamma1 + state.gamma2; }

}  // namespace siu
