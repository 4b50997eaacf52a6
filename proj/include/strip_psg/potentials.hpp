#pragma once

#include "strip_psg/scenario.hpp"

namespace strip_psg {

enum class PotentialKind { Initial, LeftBoundary, RightBoundary };

// Initial potential: ∫_0^y (t u0 + η - x) ρ0 dη, y in [0,1].
double F_of(const Scenario& s, double y, double x, double t);

// Left-wall potential: ∫_0^τ [x - u_bl (t - η)] ρ_bl u_bl dη.
double Gbl_of(const Scenario& s, double tau, double x, double t);

// Right-wall potential: ∫_0^ξ [x - 1 - u_br (t - η)] ρ_br u_br dη + F_of(s, 1, x, t).
double Gbr_of(const Scenario& s, double xi, double x, double t);

double potential_of(const Scenario& s, PotentialKind k, double param, double x, double t);

}  // namespace strip_psg
