#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "strip_psg/minimizers.hpp"

using namespace strip_psg;
using doctest::Approx;

TEST_CASE("minimize_F examples") {
  Scenario s(scenario_s1());
  for (double x : {0.0, 0.37, 1.0}) {
    auto b = minimize_F(s, x, 0.0);
    CHECK(b.lo == Approx(x).epsilon(1e-15));
    CHECK(b.hi == Approx(x).epsilon(1e-15));
  }
  auto b = minimize_F(s, 0.3, 0.1);
  CHECK(b.lo == Approx(0.5));
  CHECK(b.hi == Approx(0.5));
  CHECK(b.value == Approx(-0.125));
  b = minimize_F(s, 0.3, 0.4);
  CHECK(b.lo == 1.0);
  CHECK(b.hi == 1.0);
  CHECK(b.value == Approx(-0.6));
}

TEST_CASE("minimize_Gbl examples") {
  Scenario s(scenario_s1());
  auto b = minimize_Gbl(s, 0.0, 0.7);
  CHECK(b.lo == 0.7);
  CHECK(b.hi == 0.7);
  b = minimize_Gbl(s, 0.3, 0.4);
  CHECK(b.lo == Approx(0.3));
  CHECK(b.value == Approx(-0.405));
  b = minimize_Gbl(s, 0.5, 0.1);
  CHECK(b.lo == 0.0);
  CHECK(b.hi == 0.0);
  CHECK(b.value == 0.0);
  CHECK_THROWS_AS(minimize_Gbl(s, 0.5, 3.0), std::domain_error);
}

TEST_CASE("minimize_Gbr examples") {
  Scenario s(scenario_s1());
  auto b = minimize_Gbr(s, 1.0, 1.3);
  CHECK(b.lo == 1.3);
  CHECK(b.hi == 1.3);
  b = minimize_Gbr(s, 0.3, 0.4);
  CHECK(b.lo == 0.0);
  CHECK(b.value == Approx(-0.6));
  b = minimize_Gbr(s, 0.8, 0.4);
  CHECK(b.lo == Approx(0.2));
  CHECK(b.hi == Approx(0.2));
  // -(x-1-bt)^2/2 + (at-x+1/2) = -0.02 - 1.1
  CHECK(b.value == Approx(-1.12));
}

TEST_CASE("s1 minima and minimizers match closed forms") {
  Scenario s(scenario_s1());
  oracle::ConstantStates cs{-2, -1, 3};
  for (int i = 0; i <= 40; ++i)
    for (int j = 1; j <= 40; ++j) {
      double x = i / 40.0, t = 2.0 * j / 40.0;
      auto f = minimize_F(s, x, t);
      auto l = minimize_Gbl(s, x, t);
      auto r = minimize_Gbr(s, x, t);
      CHECK(f.value == Approx(cs.F(x, t)).epsilon(1e-12));
      CHECK(l.value == Approx(cs.Gbl(x, t)).epsilon(1e-12));
      CHECK(r.value == Approx(cs.Gbr(x, t)).epsilon(1e-12));
      CHECK(f.lo == Approx(cs.y(x, t)).epsilon(1e-12));
      CHECK(l.lo == Approx(cs.tau(x, t)).epsilon(1e-12));
      CHECK(r.lo == Approx(cs.xi(x, t)).epsilon(1e-12));
    }
}

TEST_CASE("brackets match brute-force grid minimization") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double step = 1e-4;
  for (int k = 0; k < 12; ++k) {
    auto d = random_scenario(300 + k);
    Scenario s(d);
    for (int n = 0; n < 4; ++n) {
      double x = U(rng), t = 0.05 + 0.95 * U(rng);
      auto f = minimize_F(s, x, t);
      auto g = oracle::grid_min_F(d, x, t, step);
      CHECK(std::abs(f.lo - g.lo) <= 2 * step);
      CHECK(std::abs(f.hi - g.hi) <= 2 * step);
      auto l = minimize_Gbl(s, x, t);
      auto gl = oracle::grid_min_Gbl(d, x, t, step);
      CHECK(std::abs(l.lo - gl.lo) <= 2 * step);
      CHECK(std::abs(l.hi - gl.hi) <= 2 * step);
      auto r = minimize_Gbr(s, x, t);
      auto gr = oracle::grid_min_Gbr(d, x, t, step);
      CHECK(std::abs(r.lo - gr.lo) <= 2 * step);
      CHECK(std::abs(r.hi - gr.hi) <= 2 * step);
      // exact minimum can only undercut the sampled one, by at most one
      // grid step times the integrand bound
      CHECK(r.value <= gr.value + 1e-7);
      CHECK(r.value >= gr.value - 40 * step);
    }
  }
}

TEST_CASE("classify examples") {
  Scenario s(scenario_s1());
  CHECK(classify(s, 0.1, 0.4).winner == Regime::Gbl);
  auto c = classify(s, 0.3, 0.1);
  CHECK(c.winner == Regime::F);
  CHECK(c.mu == Approx(-0.125));
  // (0.2,0.4) sits where the left-wall shock touches the fan: F and Gbl agree
  // at -0.5, and because F's minimizer is y=1 with Gbr's at xi=0, Gbr = F(1,x,t)
  // equals them too.
  c = classify(s, 0.2, 0.4);
  CHECK(c.in_F);
  CHECK(c.in_Gbl);
  CHECK(c.f.value == Approx(-0.5));
  CHECK(c.gbl.value == Approx(-0.5));
  CHECK(c.winner == Regime::Tie_All);
  auto fan = classify(s, 0.3, 0.4);
  CHECK(fan.winner == Regime::Tie_F_Gbr);
  auto t0 = classify(s, 0.4, 0.0);
  CHECK(t0.winner == Regime::F);
  CHECK(t0.f.lo == 0.4);
}

TEST_CASE("fragile flag reflects the tie margin") {
  Scenario s(scenario_s1());
  auto c = classify(s, 0.3, 0.1);
  CHECK_FALSE(c.fragile());
  // A point 1e-11 off the shock X1(t)=t/2: both potentials nearly agree.
  auto d = classify(s, 0.05 + 1e-11, 0.1);
  CHECK((d.is_tie() || d.fragile()));
}
