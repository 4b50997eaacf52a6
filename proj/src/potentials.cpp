#include "strip_psg/potentials.hpp"

#include <stdexcept>
#include <string>

namespace strip_psg {

namespace {

void require_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi))
    throw std::invalid_argument(std::string(what) + "=" + std::to_string(v) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

double F_of(const Scenario& s, double y, double x, double t) {
  require_range(y, 0.0, 1.0, "y");
  const DataPair& p = s.initial();
  return t * p.cumulative(1, 0, y) + p.cumulative(0, 1, y) - x * p.cumulative(0, 0, y);
}

double Gbl_of(const Scenario& s, double tau, double x, double t) {
  require_range(tau, 0.0, s.t_max(), "tau");
  const DataPair& p = s.left();
  return x * p.cumulative(1, 0, tau) - t * p.cumulative(2, 0, tau) + p.cumulative(2, 1, tau);
}

double Gbr_of(const Scenario& s, double xi, double x, double t) {
  require_range(xi, 0.0, s.t_max(), "xi");
  const DataPair& p = s.right();
  return (x - 1.0) * p.cumulative(1, 0, xi) - t * p.cumulative(2, 0, xi) +
         p.cumulative(2, 1, xi) + F_of(s, 1.0, x, t);
}

double potential_of(const Scenario& s, PotentialKind k, double param, double x, double t) {
  switch (k) {
    case PotentialKind::Initial: return F_of(s, param, x, t);
    case PotentialKind::LeftBoundary: return Gbl_of(s, param, x, t);
    case PotentialKind::RightBoundary: return Gbr_of(s, param, x, t);
  }
  throw std::logic_error("potential_of: bad kind");
}

}  // namespace strip_psg
