#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "strip_psg/scenario.hpp"

using namespace strip_psg;

TEST_CASE("eval is right-continuous with a left-limit accessor") {
  auto s4 = scenario_s4();
  CHECK(s4.u0.eval(0.25) == 2.0);
  CHECK(s4.u0.eval(0.5) == -2.0);
  CHECK(s4.u0.left_limit(0.5) == 2.0);
  CHECK(s4.u0.eval(1.0) == -2.0);
  CHECK(s4.u0.eval(0.0) == 2.0);
  auto one = PiecewiseConstant::constant(0, 1, 1.0);
  for (double x : {0.0, 0.1, 0.7, 1.0}) CHECK(one(x) == 1.0);
  CHECK_THROWS_AS(s4.u0.eval(1.5), std::domain_error);
  CHECK_THROWS_AS(s4.u0.eval(-0.1), std::domain_error);
}

TEST_CASE("construction rejects malformed breakpoints") {
  CHECK_THROWS_AS(PiecewiseConstant(0, 1, {0.5, 0.4}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseConstant(0, 1, {1.0}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseConstant(0, 1, {0.5}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseConstant(0, 1, {}, {NAN}), std::invalid_argument);
}

TEST_CASE("moment_integral examples") {
  auto s1 = scenario_s1();
  MomentSpec dens{true, 0, -0.5, 1.0};
  CHECK(moment_integral(s1.rho0, s1.u0, dens, 0.0, 0.3) == doctest::Approx(-0.105).epsilon(1e-14));
  CHECK(moment_integral(s1.rho0, s1.u0, dens, 0.4, 0.4) == 0.0);
  MomentSpec flux2{true, 2, 1.0, 0.0};
  CHECK(moment_integral(s1.rho_bl, s1.u_bl, flux2, 0.0, 0.5) == doctest::Approx(4.5).epsilon(1e-14));
  CHECK_THROWS_AS(moment_integral(s1.rho0, s1.u0, dens, 0.5, 0.4), std::invalid_argument);
}

TEST_CASE("moment_integral is additive and agrees with quadrature on random data") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = random_scenario(1000 + trial);
    MomentSpec spec{U(rng) < 0.8, int(U(rng) * 4) % 4, U(rng) * 2 - 1, U(rng) * 2 - 1};
    double lo = U(rng) * 0.5, hi = 0.5 + U(rng) * 0.5, mid = lo + (hi - lo) * U(rng);
    double whole = moment_integral(s.rho0, s.u0, spec, lo, hi);
    double parts = moment_integral(s.rho0, s.u0, spec, lo, mid) + moment_integral(s.rho0, s.u0, spec, mid, hi);
    CHECK(std::abs(whole - parts) <= 1e-12 * (1 + std::abs(whole)));
    double quad = oracle::integrate(
        [&](double e) {
          double f = spec.density ? s.rho0(e) : 1.0;
          return f * std::pow(s.u0(e), spec.velocity_power) * (spec.c0 + spec.c1 * e);
        },
        lo, hi, 400000, oracle::breaks_of(s.rho0, s.u0));
    CHECK(std::abs(whole - quad) <= 1e-9 * (1 + std::abs(whole)));
  }
}

TEST_CASE("density moment is nonnegative and monotone in hi") {
  auto s = Scenario(random_scenario(3));
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double v = s.initial().integral(0, 0, 0.0, i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("DataPair prefix sums match moment_integral") {
  for (int seed = 0; seed < 10; ++seed) {
    auto d = random_scenario(seed);
    Scenario s(d);
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 2; ++j) {
        MomentSpec spec{true, k, j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0};
        double a = 0.13, b = 0.87;
        CHECK(s.initial().integral(k, j, a, b) ==
              doctest::Approx(moment_integral(d.rho0, d.u0, spec, a, b)).epsilon(1e-13));
        CHECK(s.left().integral(k, j, a * d.t_max, b * d.t_max) ==
              doctest::Approx(moment_integral(d.rho_bl, d.u_bl, spec, a * d.t_max, b * d.t_max))
                  .epsilon(1e-13));
      }
  }
}

TEST_CASE("validate") {
  CHECK(validate(scenario_s1()).ok);
  CHECK(validate(scenario_s2()).ok);
  CHECK(validate(scenario_s3()).ok);
  CHECK(validate(scenario_s4()).ok);
  auto bad = scenario_s1();
  bad.u_br = PiecewiseConstant::constant(0, bad.t_max, 1.0);
  auto r = validate(bad);
  CHECK_FALSE(r.ok);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].field == "u_br");
  auto bad2 = scenario_s4();
  bad2.rho0 = PiecewiseConstant(0, 1, {0.5}, {1.0, 0.0});
  r = validate(bad2);
  CHECK_FALSE(r.ok);
  CHECK(r.violations[0].field == "rho0");
  CHECK(r.violations[0].piece == 1);
}

TEST_CASE("scenario JSON round trip and rejection") {
  auto s3 = scenario_s3();
  auto back = scenario_from_json(scenario_to_json(s3));
  CHECK(back.t_max == s3.t_max);
  CHECK(back.u_bl.breakpoints() == s3.u_bl.breakpoints());
  CHECK(back.u_br.values() == s3.u_br.values());
  CHECK_THROWS_AS(scenario_from_json("{\"t_max\": 1}"), std::invalid_argument);
  std::string inf_value = scenario_to_json(s3);
  auto pos = inf_value.find("\"t_max\": 1.5");
  REQUIRE(pos != std::string::npos);
  inf_value.replace(pos, 12, "\"t_max\": 1e999");
  CHECK_THROWS_AS(scenario_from_json(inf_value), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json("{\"t_max\": NaN}"), std::invalid_argument);
}

TEST_CASE("builtins") {
  CHECK(builtin_scenario("s3").u_bl.eval(0.5) == 3.0);
  CHECK(builtin_scenario("s2").u0.eval(0.1) == 2.0);
  CHECK_THROWS_AS(builtin_scenario("s9"), std::invalid_argument);
  Scenario s1(scenario_s1());
  CHECK(s1.total_mass(2.0) == doctest::Approx(9.0));
  CHECK(s1.speed_scale() == 3.0);
}
