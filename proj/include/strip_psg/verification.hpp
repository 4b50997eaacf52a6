#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strip_psg/characteristics.hpp"

namespace strip_psg {

struct CheckReport {
  std::string name;
  bool pass = true;
  double worst = 0.0;  // largest violation seen (0 if none)
  double worst_x = 0.0, worst_t = 0.0;
  double tolerance = 0.0;
  long samples = 0;
  long skipped = 0;
  std::string note;

  // Record a violation magnitude at (x,t); keeps the largest.
  void observe(double violation, double x, double t);
  // pass = worst <= tolerance
  void finish();
};

std::string to_json(const CheckReport& r);
std::string to_json(const std::vector<CheckReport>& rs);

// C² bump (1-ξ²)³(1-ζ²)³ with ξ=(x-x0)/rx, ζ=(t-t0)/rt; zero outside.
struct TestFunction {
  double x0 = 0.5, t0 = 0.5;
  double rx = 0.1, rt = 0.1;
  double amplitude = 1.0;

  double value(double x, double t) const;
  double dx(double x, double t) const;
  double dt(double x, double t) const;
};

struct WeakResidual {
  double r1 = 0.0, r2 = 0.0;
  // sums of absolute values of the terms, for relative comparisons
  double scale1 = 0.0, scale2 = 0.0;
  double rel1() const { return scale1 > 0.0 ? std::abs(r1) / scale1 : 0.0; }
  double rel2() const { return scale2 > 0.0 ? std::abs(r2) / scale2 : 0.0; }
};

// Midpoint tensor quadrature over the support of each bump, nx × nt cells.
// Interior atoms contribute at their own location with their own velocity.
std::vector<WeakResidual> weak_residuals(const Scenario& s, const std::vector<TestFunction>& phis,
                                         int nx, int nt);
CheckReport check_weak(const Scenario& s, const std::vector<TestFunction>& phis, int nx, int nt,
                       double tol = 5e-3);

CheckReport check_entropy(const Scenario& s, double t, int nx);
CheckReport check_boundary_traces(const Scenario& s, const std::vector<double>& times,
                                  double tol = 0.02);

struct Rect {
  double x1, x2, t1, t2;
};
CheckReport check_mu_identities(const Scenario& s, const std::vector<Rect>& rects,
                                double tol = 1e-6);
CheckReport check_rn_derivatives(const Scenario& s, double t, int nx);
CheckReport check_H_identities(const Scenario& s, const std::vector<std::pair<double, double>>& pts,
                               double h);
CheckReport check_minimizer_lemmas(const Scenario& s, int n_samples, std::uint64_t seed);
CheckReport check_triangles(const Scenario& s, int n_samples, std::uint64_t seed);

}  // namespace strip_psg
