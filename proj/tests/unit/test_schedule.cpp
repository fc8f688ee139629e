#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "siu/error.hpp"
#include "siu/rng.hpp"
#include "siu/schedule.hpp"

using siu::ScheduleConfig;

namespace {

bool mentions(const std::vector<siu::Violation>& vs, const std::string& needle) {
  for (const auto& v : vs)
    if (v.constraint.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate") {
  SUBCASE("published constants are admissible") {
    ScheduleConfig c(1.54e-4, 3.78e-2, 0.15, 0.001, 0.201, 100.0, 300);
    CHECK(siu::validate(c, 1.0 / 3.78e-2, 0.1).empty());
    CHECK(siu::validate(c, 22.6, 0.08).empty());
  }
  SUBCASE("s outside (0, 1/2)") {
    ScheduleConfig c(0.1, 0.1, 0.5, 0.1, 0.6, 1.0, 4);
    auto vs = siu::validate(c, 1.0, 0.5);
    REQUIRE(mentions(vs, "s < 1/2"));
    CHECK(vs.front().value == doctest::Approx(0.6));
  }
  SUBCASE("a above 1/(1-2s)") {
    ScheduleConfig c(2.5, 0.1, 0.5, 0.1, 0.25, 1.0, 4);
    auto vs = siu::validate(c, 1.0, 0.5);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].constraint == "a <= 1/(1-2s)=2");
    CHECK(vs[0].value == 2.5);
  }
  SUBCASE("b above 1/lambdaN and exponent ordering") {
    ScheduleConfig c(0.1, 0.5, 0.1, 0.2, 0.25, 1.0, 4);
    auto vs = siu::validate(c, 4.0, 1.0);
    CHECK(mentions(vs, "b <= 1/lambdaN"));
    CHECK(mentions(vs, "tau2 < tau1"));
  }
  SUBCASE("disconnected graph") {
    ScheduleConfig c(0.1, 0.1, 0.5, 0.1, 0.25, 1.0, 4);
    CHECK(mentions(siu::validate(c, 2.0, 0.0), "lambda2 > 0"));
  }
}

TEST_CASE("kappa constants follow the agent count") {
  ScheduleConfig c(0.1, 0.1, 0.5, 0.1, 0.25, 1.0, 9);
  CHECK(c.kappa1() == 4.0);
  CHECK(c.kappa2() == 6.0);
  CHECK_THROWS_AS(c.set_n_agents(0), std::invalid_argument);
}

TEST_CASE("alpha and beta step sizes") {
  ScheduleConfig c(0.5, 0.1, 0.5, 0.5 - 1e-9, 0.25, 1.0, 4);
  CHECK(siu::alpha(c, 0) == 0.5);
  CHECK(siu::alpha(c, 3) == doctest::Approx(0.25));
  CHECK(siu::beta(c, 0) == 0.1);
  CHECK(siu::beta(c, 3) == doctest::Approx(0.05).epsilon(1e-8));

  ScheduleConfig paper(1.54e-4, 3.78e-2, 0.15, 0.001, 0.201, 100.0, 300);
  CHECK(siu::alpha(paper, 0) == 1.54e-4);

  for (std::int64_t t = 0; t < 100; ++t) CHECK(siu::beta(paper, t + 1) <= siu::beta(paper, t));
  for (std::int64_t t : {0LL, 10LL, 1000LL, 100000LL, 999999LL}) {
    CHECK(siu::alpha(paper, t + 1) < siu::alpha(paper, t));
    CHECK(siu::beta(paper, t + 1) < siu::beta(paper, t));
    CHECK(siu::alpha(paper, t + 1) > 0.0);
  }
}

TEST_CASE("gamma recursion") {
  ScheduleConfig c(0.5, 0.1, 0.5, 0.1, 0.25, 1.0, 4);
  auto g0 = siu::gamma_initial(c);
  CHECK(g0.gamma1 == 0.0);
  CHECK(g0.gamma2 == 1.0);
  CHECK(siu::gamma_total(g0) == 1.0);

  // kappa2 = 4, alpha_0 = 0.5: gamma1 = 4 * 0.5 * 1, gamma2 = (1 - 0.5 * 0.5) * 1.
  auto g1 = siu::gamma_advance(g0, c, 0.7);
  CHECK(g1.t == 1);
  CHECK(g1.gamma1 == doctest::Approx(2.0));
  CHECK(g1.gamma2 == doctest::Approx(0.75));
  CHECK(siu::gamma_total(g1) == doctest::Approx(2.75));

  SUBCASE("zero is a fixed point") {
    ScheduleConfig z = c;
    z.eta = 0.0;
    auto g = siu::gamma_initial(z);
    for (int t = 0; t < 1000; ++t) g = siu::gamma_advance(g, z, 0.7);
    CHECK(g.gamma1 == 0.0);
    CHECK(g.gamma2 == 0.0);
  }

  SUBCASE("matches the 2x2 linear system") {
    ScheduleConfig p(1e-3, 0.05, 0.3, 0.05, 0.3, 5.0, 25);
    const double l2 = 0.4;
    auto g = siu::gamma_initial(p);
    Eigen::Vector2d ref(0.0, 5.0);
    for (int t = 0; t < 2000; ++t) {
      const double a = 1e-3 / std::pow(t + 1.0, 0.3);
      const double b = 0.05 / std::pow(t + 1.0, 0.05);
      Eigen::Matrix2d A;
      A << 1 - b * l2 + 6.0 * a, 10.0 * a, a, 1 - a * (1 - 0.6);
      ref = A * ref;
      g = siu::gamma_advance(g, p, l2);
    }
    CHECK(g.gamma1 == doctest::Approx(ref(0)).epsilon(1e-12));
    CHECK(g.gamma2 == doctest::Approx(ref(1)).epsilon(1e-12));
  }

  SUBCASE("negative component is an invariant violation") {
    ScheduleConfig bad(5.0, 0.1, 0.5, 0.1, 0.25, 1.0, 4);
    CHECK_THROWS_AS(siu::gamma_advance(siu::gamma_initial(bad), bad, 0.5), siu::InvariantViolation);
  }
}

TEST_CASE("gamma stays nonnegative under random valid configurations") {
  siu::Rng rng = siu::make_rng({77});
  for (int trial = 0; trial < 20; ++trial) {
    const double s = 0.01 + 0.48 * siu::uniform01(rng);
    const double tau1 = 0.2 + 0.75 * siu::uniform01(rng);
    const double tau2 = tau1 * (0.05 + 0.9 * siu::uniform01(rng));
    const double lambdaN = 1.0 + 30.0 * siu::uniform01(rng);
    const double lambda2 = lambdaN * (0.01 + 0.99 * siu::uniform01(rng));
    const int n = 2 + static_cast<int>(rng() % 400);
    ScheduleConfig c(siu::uniform01(rng) / (1 - 2 * s), siu::uniform01(rng) / lambdaN, tau1, tau2, s,
                     1.0 + 99.0 * siu::uniform01(rng), n);
    if (c.a == 0.0 || c.b == 0.0) continue;
    REQUIRE(siu::validate(c, lambdaN, lambda2).empty());
    auto g = siu::gamma_initial(c);
    bool ok = true;
    for (int t = 0; t < 10000 && ok; ++t) {
      g = siu::gamma_advance(g, c, lambda2);
      ok = g.gamma1 >= 0.0 && g.gamma2 >= 0.0;
    }
    CHECK(ok);
  }
}
