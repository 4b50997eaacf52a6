#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "strip_psg/fields.hpp"

using namespace strip_psg;
using doctest::Approx;

TEST_CASE("velocity examples") {
  Scenario s(scenario_s1());
  CHECK(u_at(s, 0.1, 0.4) == Approx(3.0));
  CHECK(u_at(s, 0.3, 0.4) == Approx(-1.75));
  CHECK(u_at(s, 0.3, 0.1) == Approx(-2.0));
  // shock between initial data and left inflow
  CHECK(u_at(s, 0.05, 0.1) == Approx(0.5));
  // shock between the two inflows
  CHECK(u_at(s, 0.75, 1.0) == Approx(1.0));
  // right wall absorbing everything
  CHECK(u_at(s, 1.0, 2.0) == 0.0);
  // left wall, inflow regime
  CHECK(u_at(s, 0.0, 0.4) == Approx(3.0));
}

TEST_CASE("one-sided velocities across the first shock") {
  Scenario s(scenario_s1());
  double t = 0.1, x = 0.05;
  CHECK(u_at(s, x, t, Side::Left) == Approx(3.0));
  CHECK(u_at(s, x, t, Side::Right) == Approx(-2.0));
}

TEST_CASE("mass examples") {
  Scenario s(scenario_s1());
  CHECK(m_at(s, 0.3, 0.1) == Approx(0.5));
  CHECK(m_at(s, 0.3, 0.4) == Approx(1.0));
  CHECK(m_at(s, 1.0, 2.0) == Approx(3.0));
  CHECK(m_at(s, 1.0, 2.0, Side::Left) == Approx(-5.0));
  CHECK(m_at(s, 0.0, 0.4) == Approx(-1.2));
}

TEST_CASE("momentum examples") {
  Scenario s(scenario_s1());
  CHECK(q_at(s, 0.3, 0.1) == Approx(-1.0));
  CHECK(q_at(s, 0.1, 0.4) == Approx(-3.3));
}

TEST_CASE("s1 right wall atom") {
  Scenario s(scenario_s1());
  auto m = measure_at(s, 2.0, 64);
  CHECK(m.right_atom == Approx(8.0).epsilon(1e-9));
  CHECK(m.left_atom == 0.0);
  CHECK(m.interior_atoms.empty());
  for (double t : {1.3, 1.8, 2.4}) CHECK(measure_at(s, t, 32).right_atom == Approx(4 * t).epsilon(1e-9));
}

TEST_CASE("mass balance on random scenarios") {
  for (int k = 0; k < 25; ++k) {
    Scenario s(random_scenario(200 + k));
    for (double t : {0.05, 0.2, 0.55, 1.0}) {
      auto m = measure_at(s, t, 64);
      double expected = s.total_mass(t);
      CHECK(m.total_mass() == Approx(expected).epsilon(1e-8));
      CHECK(m.m_one - m.m_zero == Approx(expected).epsilon(1e-9));
      for (double d : m.density) CHECK(d >= -1e-9);
    }
  }
}

TEST_CASE("m is nondecreasing in x") {
  for (int k = 0; k < 15; ++k) {
    Scenario s(random_scenario(600 + k));
    for (double t : {0.15, 0.6, 0.95}) {
      double prev = m_at(s, 0.0, t);
      for (int i = 1; i <= 300; ++i) {
        double v = m_at(s, i / 300.0, t);
        CHECK(v >= prev - 1e-9);
        prev = v;
      }
    }
  }
}

TEST_CASE("velocity respects the entropy inequality across jumps") {
  for (int k = 0; k < 15; ++k) {
    Scenario s(random_scenario(700 + k));
    for (double t : {0.2, 0.7}) {
      for (int i = 1; i < 400; ++i) {
        double x = i / 400.0;
        double l = u_at(s, x, t, Side::Left), r = u_at(s, x, t, Side::Right);
        CHECK(l >= r - 1e-9);
      }
    }
  }
}

TEST_CASE("s1 interior density and velocity in constant regions") {
  Scenario s(scenario_s1());
  auto m = measure_at(s, 0.1, 100);
  // region between the first shock and the free initial data: rho = 1
  for (std::size_t i = 0; i < m.density.size(); ++i) {
    double x = 0.5 * (m.grid[i] + m.grid[i + 1]);
    if (x > 0.1 && x < 0.75) CHECK(m.density[i] == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("shock between two inflows carries an interior atom") {
  Scenario s(scenario_s1());
  // on X3(t) = t - 1/4, mass from both inflows accumulates
  auto m = measure_at(s, 1.0, 128);
  REQUIRE(m.interior_atoms.size() == 1);
  CHECK(m.interior_atoms[0].x == Approx(0.75).epsilon(1e-6));
  CHECK(m.interior_atoms[0].u == Approx(1.0));
}

TEST_CASE("velocity on the second s1 shock is its speed") {
  Scenario s(scenario_s1());
  for (double t : {0.45, 0.5, 0.55, 0.6}) {
    double x = 3 * t + 1 - std::sqrt(10 * t);
    CHECK(u_at(s, x, t) == Approx(3 - 5 / std::sqrt(10 * t)).epsilon(1e-6));
  }
}

TEST_CASE("energy potential examples") {
  Scenario s(scenario_s1());
  EnergyContext ctx(s, 0.1);
  CHECK(E_at(s, 0.3, 0.1, ctx) == Approx(0.375).epsilon(1e-6));
  // Traced positions: absorbed particles sit on the shock at 0.05, free
  // ones at eta - 0.2, so the integral is -2 [0.25 (-0.25) + 0.03125] = 0.1875.
  CHECK(H_at(s, 0.3, 0.1, ctx) == Approx(0.1875).epsilon(1e-6));
  CHECK_THROWS_AS(E_at(s, 0.3, 0.2, ctx), std::invalid_argument);
}

TEST_CASE("H derivative recovers minus the momentum") {
  Scenario s(scenario_s1());
  const double h = 1e-4;
  for (double t : {0.1, 0.5, 1.0}) {
    EnergyContext ctx(s, t);
    for (double x : {0.13, 0.31, 0.58, 0.87}) {
      double d = (H_at(s, x + h, t, ctx) - H_at(s, x - h, t, ctx)) / (2 * h);
      CHECK(d == Approx(-q_at(s, x, t)).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("traces are monotone in the particle parameter") {
  for (int k = 0; k < 8; ++k) {
    Scenario s(random_scenario(800 + k));
    EnergyContext ctx(s, 0.6);
    for (Family f : {Family::Initial, Family::Left, Family::Right}) {
      const auto& nodes = ctx.nodes(f);
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (f == Family::Left)
          CHECK(nodes[i].x <= nodes[i - 1].x + 1e-9);
        else
          CHECK(nodes[i].x >= nodes[i - 1].x - 1e-9);
      }
    }
  }
}
