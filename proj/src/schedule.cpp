#include "siu/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "siu/error.hpp"
#include "siu/format.hpp"

namespace siu {

ScheduleConfig::ScheduleConfig(double a_, double b_, double tau1_, double tau2_, double s_, double eta_,
                               int n_agents)
    : a(a_), b(b_), tau1(tau1_), tau2(tau2_), s(s_), eta(eta_) {
  set_n_agents(n_agents);
}

void ScheduleConfig::set_n_agents(int n) {
  if (n < 1) throw std::invalid_argument("schedule: n_agents must be >= 1");
  n_agents_ = n;
  const double root = std::sqrt(static_cast<double>(n));
  kappa1_ = 1.0 + root;
  kappa2_ = 2.0 * root;
}

std::vector<Violation> validate(const ScheduleConfig& c, double lambdaN, double lambda2) {
  std::vector<Violation> out;
  auto add = [&](std::string constraint, double value) {
    std::string msg = constraint + " violated (value " + format_double(value) + ")";
    out.push_back({std::move(constraint), value, std::move(msg)});
  };
  if (!(c.s > 0.0)) add("s > 0", c.s);
  if (!(c.s < 0.5)) add("s < 1/2", c.s);
  if (!(c.tau2 > 0.0)) add("tau2 > 0", c.tau2);
  if (!(c.tau2 < c.tau1)) add("tau2 < tau1", c.tau2);
  if (!(c.tau1 < 1.0)) add("tau1 < 1", c.tau1);
  if (!(c.a > 0.0)) add("a > 0", c.a);
  if (c.s < 0.5) {
    const double a_max = 1.0 / (1.0 - 2.0 * c.s);
    if (!(c.a <= a_max)) add("a <= 1/(1-2s)=" + format_double(a_max), c.a);
  }
  if (!(c.b > 0.0)) add("b > 0", c.b);
  if (!(lambdaN > 0.0)) {
    add("lambdaN > 0", lambdaN);
  } else if (!(c.b <= 1.0 / lambdaN)) {
    add("b <= 1/lambdaN=" + format_double(1.0 / lambdaN), c.b);
  }
  if (!(lambda2 > 0.0)) add("lambda2 > 0 (connected graph)", lambda2);
  if (!(c.eta > 0.0)) add("eta > 0", c.eta);
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

double alpha(const ScheduleConfig& c, std::int64_t t) {
  return c.a / std::pow(static_cast<double>(t + 1), c.tau1);
}

double beta(const ScheduleConfig& c, std::int64_t t) {
  return c.b / std::pow(static_cast<double>(t + 1), c.tau2);
}

GammaState gamma_initial(const ScheduleConfig& c) { return {0.0, c.eta, 0}; }

GammaState gamma_advance(const GammaState& g, const ScheduleConfig& c, double lambda2) {
  const double al = alpha(c, g.t);
  const double be = beta(c, g.t);
  // Operand order is shared with lemma::simulate_coupled so the two stay bit-identical.
  GammaState next;
  next.gamma1 = (1.0 - lambda2 * be + c.kappa1() * al) * g.gamma1 + c.kappa2() * al * g.gamma2;
  next.gamma2 = (1.0 - (1.0 - 2.0 * c.s) * al) * g.gamma2 + 1.0 * al * g.gamma1;
  next.t = g.t + 1;
  if (next.gamma1 < 0.0 || next.gamma2 < 0.0) {
    throw InvariantViolation("gamma recursion went negative at t=" + std::to_string(next.t) +
                             " (gamma1=" + format_double(next.gamma1) + ", gamma2=" +
                             format_double(next.gamma2) + "); configuration is outside the valid range");
  }
  return next;
}

}  // namespace siu
