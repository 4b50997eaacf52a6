#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strip_psg/fields.hpp"

namespace strip_psg {

// Right derivative of a forward characteristic through (x,t). Off the walls
// this is u; at a wall whose capture condition holds it is 0.
struct CurveVelocity {
  double value = 0.0;
  // At the edge of a fan next to a tie (F=Gbl or F=Gbr with one zero-mass
  // side) both the tie formula and the fan slope apply; `alternative` holds
  // the fan slope and `conflict` is set when the two disagree.
  std::optional<double> alternative;
  bool conflict = false;
  RegimeClassification regime;
};
CurveVelocity curve_velocity_detail(const Scenario& s, double x, double t);
double curve_velocity(const Scenario& s, double x, double t);

// True when a curve sitting on the wall stays there (the wall's own
// potential is strictly beaten).
bool left_capture(const RegimeClassification& at_zero);
bool right_capture(const RegimeClassification& at_one);

enum class Origin { Interior, Initial, LeftBoundary, RightBoundary };
enum class Wall { Left, Right };

struct CharCurve {
  std::vector<std::pair<double, double>> samples;  // (t, x)
  Origin origin = Origin::Interior;
  double origin_param = 0.0;  // eta for the initial/boundary families
  std::optional<std::pair<Wall, double>> captured;
  std::string diagnostic;  // non-empty if tracing aborted
  int fan_conflicts = 0;

  bool ok() const { return diagnostic.empty(); }
};

// Explicit midpoint integration of x' = curve_velocity from (x1,t1) to t_end.
CharCurve trace_curve(const Scenario& s, double x1, double t1, double t_end, double dt);

// Characteristic triangle of a point: two straight bounding lines from the
// apex to feet on the initial line (y,0), the left wall (0,tau) or the right
// wall (1,xi).
struct Triangle {
  double x0 = 0.0, t0 = 0.0;
  bool boundary = false;
  bool applicable = true;  // false for a wall point in the inflow regime
  int case_id = 1;         // interior 1..6, boundary 1..4
  Regime regime = Regime::F;
  MinimizerBracket f, gbl, gbr;

  struct Line {
    bool present = false;
    double foot_x = 0.0, foot_t = 0.0;
    double at(double x0, double t0, double t) const;
  };
  Line left, right;  // region is left.at(t) <= x <= right.at(t)

  // Horizontal extent at time t (clamped to [0,1]); empty if lo > hi.
  std::pair<double, double> extent(double t) const;
};

std::string case_name(const Triangle& tri);
Triangle triangle_of(const Scenario& s, double x0, double t0);
bool triangle_contains(const Triangle& tri, double x, double t, double tol = 1e-12);

// Jump curves of u: per time slice, points where u jumps by more than the
// jump threshold; linked across slices by nearest neighbour.
struct LocusOptions {
  double link_slack = 2.0;  // in units of 1/nx, added to speed*dt
};
std::vector<CharCurve> shock_locus(const Scenario& s, double t_lo, double t_hi, int nt, int nx,
                                   LocusOptions opt = {});

// Jump points of u(.,t) on [0,1] found from nx cells.
std::vector<double> jump_points(const Scenario& s, double t, int nx);

// A jump of u(.,t) inside [a,b], if the one-sided values at the ends differ
// by more than the jump threshold and the difference survives bisection.
std::optional<double> locate_jump(const Scenario& s, double t, double a, double b);

}  // namespace strip_psg
