#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "strip_psg/characteristics.hpp"

using namespace strip_psg;
using doctest::Approx;

namespace {

double x_at(const CharCurve& c, double t) {
  for (std::size_t i = 1; i < c.samples.size(); ++i)
    if (c.samples[i].first >= t - 1e-12) {
      auto [ta, xa] = c.samples[i - 1];
      auto [tb, xb] = c.samples[i];
      return xa + (xb - xa) * (t - ta) / (tb - ta);
    }
  return c.samples.back().second;
}

std::vector<ScenarioData> property_scenarios() {
  std::vector<ScenarioData> out{scenario_s1(), scenario_s2(), scenario_s3(), scenario_s4()};
  for (int k = 0; k < 20; ++k) out.push_back(random_scenario(4000 + k));
  return out;
}

}  // namespace

TEST_CASE("curve velocity examples") {
  Scenario s(scenario_s1());
  CHECK(curve_velocity(s, 0.75, 1.0) == Approx(1.0));
  CHECK(curve_velocity(s, 1.0, 2.0) == 0.0);
  CHECK(curve_velocity(s, 0.05, 0.1) == Approx(0.5));
  CHECK(curve_velocity(s, 0.3, 0.1) == Approx(-2.0));
  CHECK(curve_velocity(s, 0.0, 0.3) == Approx(3.0));
}

TEST_CASE("trace through the first shock") {
  Scenario s(scenario_s1());
  auto c = trace_curve(s, 0.3, 0.1, 1.0, 1e-4);
  REQUIRE(c.ok());
  CHECK_FALSE(c.captured);
  CHECK(x_at(c, 0.15) == Approx(0.2).epsilon(5e-4));
  for (double t : {0.25, 0.35, 0.5, 0.6, 0.8, 1.0})
    CHECK(std::abs(x_at(c, t) - oracle::s1_shock(t)) <= 5e-4);
}

TEST_CASE("trace from the fan side joins the shock") {
  Scenario s(scenario_s1());
  auto c = trace_curve(s, 0.9, 0.05, 0.9, 1e-4);
  REQUIRE(c.ok());
  // starts on the fan edge x = 1 - 2t and rides it down to X1 at t = 0.4
  CHECK(std::abs(x_at(c, 0.3) - 0.4) <= 5e-4);
  CHECK(std::abs(x_at(c, 0.5) - oracle::s1_shock(0.5)) <= 5e-4);
  CHECK(std::abs(x_at(c, 0.9) - oracle::s1_shock(0.9)) <= 5e-4);
}

TEST_CASE("s3 centre curve stays put") {
  Scenario s(scenario_s3());
  auto c = trace_curve(s, 0.5, 0.1, 1.0, 1e-3);
  REQUIRE(c.ok());
  for (const auto& [t, x] : c.samples) CHECK(x == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("curve captured by the right wall") {
  Scenario s(scenario_s1());
  auto c = trace_curve(s, 0.9, 1.2, 2.0, 1e-4);
  REQUIRE(c.ok());
  REQUIRE(c.captured);
  CHECK(c.captured->first == Wall::Right);
  CHECK(c.captured->second == Approx(1.25).epsilon(2e-3));
  CHECK(c.samples.back().second == 1.0);
}

TEST_CASE("trace_curve rejects bad arguments") {
  Scenario s(scenario_s1());
  CHECK_THROWS_AS(trace_curve(s, 0.3, 0.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(trace_curve(s, 0.3, 0.5, 0.4, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(trace_curve(s, 0.3, 0.1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("traced curves are Lipschitz") {
  for (const auto& d : property_scenarios()) {
    Scenario s(d);
    double t1 = 0.1;
    double bound = std::max(s.speed_scale(), 1.0 / t1);
    for (double x1 : {0.1, 0.45, 0.8}) {
      auto c = trace_curve(s, x1, t1, s.t_max(), 2e-3 * s.t_max());
      for (std::size_t i = 1; i < c.samples.size(); ++i) {
        double dt = c.samples[i].first - c.samples[i - 1].first;
        double dx = std::abs(c.samples[i].second - c.samples[i - 1].second);
        CHECK(dx <= bound * dt * (1 + 1e-9) + 1e-12);
      }
    }
  }
}

TEST_CASE("triangle examples") {
  Scenario s(scenario_s1());
  auto a = triangle_of(s, 0.3, 0.1);
  CHECK(a.case_id == 1);
  CHECK_FALSE(a.boundary);
  CHECK(a.left.foot_x == Approx(0.5));
  CHECK(a.right.foot_x == Approx(0.5));
  auto b = triangle_of(s, 0.75, 1.0);
  CHECK(b.case_id == 4);
  CHECK(b.left.foot_x == 0.0);
  CHECK(b.right.foot_x == 1.0);
  auto w = triangle_of(s, 0.0, 0.3);
  CHECK_FALSE(w.applicable);
  auto r = triangle_of(s, 1.0, 2.0);
  CHECK(r.boundary);
  CHECK(r.case_id == 4);
  CHECK(r.left.foot_x == 0.0);
  CHECK(r.left.foot_t == Approx(2.0 - 1.0 / 3.0));
}

TEST_CASE("triangle membership") {
  Scenario s(scenario_s1());
  auto tri = triangle_of(s, 0.1, 0.2);
  CHECK(tri.case_id == 5);
  CHECK(triangle_contains(tri, 0.1, 0.2));
  CHECK_FALSE(triangle_contains(tri, 0.3, -0.1));
  CHECK(triangle_contains(tri, 0.5, 0.0));
  CHECK_FALSE(triangle_contains(tri, 0.9, 0.1));
  CHECK(triangle_contains(tri, 0.0, 0.1));
  CHECK_FALSE(triangle_contains(tri, 0.0, 0.19));
}

TEST_CASE("triangles of distinct points at equal time do not cross") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& d : property_scenarios()) {
    Scenario s(d);
    for (int n = 0; n < 40; ++n) {
      double t = (0.05 + 0.95 * U(rng)) * s.t_max();
      double x1 = U(rng), x2 = U(rng);
      if (x1 > x2) std::swap(x1, x2);
      if (x2 - x1 < 1e-9) continue;
      auto a = triangle_of(s, x1, t), b = triangle_of(s, x2, t);
      for (int k = 0; k <= 20; ++k) {
        double tt = t * k / 20.0;
        auto [al, ar] = a.extent(tt);
        auto [bl, br] = b.extent(tt);
        if (al > ar || bl > br) continue;
        CHECK(ar <= bl + 1e-9);
      }
    }
  }
}

TEST_CASE("triangles at fixed time cover the slab below") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& d : property_scenarios()) {
    Scenario s(d);
    for (int n = 0; n < 20; ++n) {
      double t0 = (0.1 + 0.9 * U(rng)) * s.t_max();
      double t = t0 * U(rng), x = U(rng);
      // largest interior apex whose triangle starts at or before x
      double lo = 1e-12, hi = 1.0 - 1e-12;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        auto [l, r] = triangle_of(s, mid, t0).extent(t);
        (void)r;
        if (l <= x) lo = mid;
        else hi = mid;
      }
      bool covered = false;
      for (double a : {lo, hi, 0.0, 1.0}) covered = covered || triangle_contains(triangle_of(s, a, t0), x, t, 1e-6);
      CHECK(covered);
    }
  }
}

TEST_CASE("triangles grow along traced curves") {
  // A traced curve that rides a shock sits O(dt) off it, so apexes are
  // snapped onto a nearby jump before taking the triangle.
  auto apex = [](const Scenario& s, const CharCurve& c, double t) {
    double x = x_at(c, t);
    if (x == 0.0 || x == 1.0) return x;
    return locate_jump(s, t, x - 2e-3, x + 2e-3).value_or(x);
  };
  for (const auto& d : property_scenarios()) {
    Scenario s(d);
    double T = s.t_max();
    for (double x1 : {0.2, 0.7}) {
      auto c = trace_curve(s, x1, 0.1 * T, T, 1e-4 * T);
      REQUIRE(c.ok());
      double ta = 0.3 * T, tb = 0.6 * T, tc = 0.95 * T;
      auto A = triangle_of(s, apex(s, c, ta), ta);
      auto B = triangle_of(s, apex(s, c, tb), tb);
      auto C = triangle_of(s, apex(s, c, tc), tc);
      for (int k = 0; k <= 10; ++k) {
        double t = ta * k / 10.0;
        auto [al, ar] = A.extent(t);
        auto [bl, br] = B.extent(t);
        auto [cl, cr] = C.extent(t);
        if (al <= ar && B.applicable) {
          CHECK(bl <= al + 2e-3);
          CHECK(br >= ar - 2e-3);
        }
        if (bl <= br && C.applicable) {
          CHECK(cl <= bl + 2e-3);
          CHECK(cr >= br - 2e-3);
        }
      }
    }
  }
}

TEST_CASE("s1 shock locus matches the closed form") {
  Scenario s(scenario_s1());
  int nx = 400;
  auto loci = shock_locus(s, 0.01, 1.25, 200, nx);
  REQUIRE(!loci.empty());
  std::size_t longest = 0;
  for (std::size_t i = 0; i < loci.size(); ++i)
    if (loci[i].samples.size() > loci[longest].samples.size()) longest = i;
  CHECK(loci[longest].samples.size() >= 195);
  for (const auto& c : loci)
    for (const auto& [t, x] : c.samples) CHECK(std::abs(x - oracle::s1_shock(t)) <= 2.0 / nx);
}

TEST_CASE("s4 locus is the vertical line and fans are not reported") {
  Scenario s(scenario_s4());
  auto loci = shock_locus(s, 0.01, 1.5, 150, 300);
  REQUIRE(loci.size() == 1);
  for (const auto& [t, x] : loci[0].samples) CHECK(x == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("s3 loci merge near (1/2, 7/10)") {
  Scenario s(scenario_s3());
  auto loci = shock_locus(s, 0.02, 1.0, 490, 400);
  // three curves before the merge, one after
  for (double t : {0.6, 0.65}) CHECK(jump_points(s, t, 400).size() == 3);
  for (double t : {0.75, 0.9}) CHECK(jump_points(s, t, 400).size() == 1);
  for (const auto& c : loci)
    for (const auto& [t, x] : c.samples) {
      if (t > 0.52 && t < 0.68) {
        bool near = std::abs(x - 0.5) < 5e-3 || std::abs(x - 2.5 * (t - 0.5)) < 5e-3 ||
                    std::abs(x - (1 - 2.5 * (t - 0.5))) < 5e-3;
        CHECK(near);
      }
    }
}
