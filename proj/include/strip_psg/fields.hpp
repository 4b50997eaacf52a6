#pragma once

#include <vector>

#include "strip_psg/minimizers.hpp"

namespace strip_psg {

enum class Side { Left, Right, Principal };

// Velocity u(x,t). Tie points use the combined-moment tie formulas; fan
// points use x/t or (x-1)/t. Walls follow the inflow/capture rule.
double u_at(const Scenario& s, double x, double t);
double u_from(const Scenario& s, const RegimeClassification& c);

// One-sided limits u(x-,t), u(x+,t) from the extreme minimizers of the
// regime that wins on that side. Left at x=0 and Right at x=1 return u_at.
double u_at(const Scenario& s, double x, double t, Side side);
double u_from(const Scenario& s, const RegimeClassification& c, Side side);

// Cumulative mass m(x,t). m(0,t) = -(left inflow), m(1,t) = initial mass + right inflow.
double m_at(const Scenario& s, double x, double t, Side side = Side::Principal);
double m_from(const Scenario& s, const RegimeClassification& c, Side side = Side::Principal);

// Cumulative momentum q(x,t), same branch structure as m.
double q_at(const Scenario& s, double x, double t, Side side = Side::Principal);
double q_from(const Scenario& s, const RegimeClassification& c, Side side = Side::Principal);

// True when a wall Dirac mass can sit at x=0 (resp. x=1): the wall's own
// potential is not strictly the smallest there.
bool left_wall_atom_regime(const RegimeClassification& at_zero);
bool right_wall_atom_regime(const RegimeClassification& at_one);

struct FieldSample {
  double x = 0.0, t = 0.0;
  double u = 0.0;
  double m = 0.0;
  RegimeClassification regime;
};
FieldSample sample_field(const Scenario& s, double x, double t);

struct Atom {
  double x = 0.0;
  double mass = 0.0;
  double u = 0.0;  // velocity of the atom (tie-branch value)
};

struct MeasureOnStrip {
  double t = 0.0;
  std::vector<double> grid;     // cell boundaries
  std::vector<double> density;  // absolutely continuous part, one per cell
  std::vector<Atom> interior_atoms;
  double left_atom = 0.0;
  double right_atom = 0.0;
  double m_zero = 0.0;  // m(0,t)
  double m_one = 0.0;   // m(1,t)
  double threshold = 0.0;

  double absolutely_continuous_mass() const;
  double atom_mass() const;
  double total_mass() const { return absolutely_continuous_mass() + atom_mass(); }
};

// Densities on grid_n equal cells of [0,1]; interior atoms located by
// excess-mass bisection on `subcells` sub-cells per cell.
MeasureOnStrip measure_at(const Scenario& s, double t, int grid_n, int subcells = 4);

// Interior atoms of m(.,t) in [a,b] (a,b inside [0,1]); n cells, `subcells` each.
std::vector<Atom> find_atoms(const Scenario& s, double t, double a, double b, int n,
                             int subcells = 1);

// Inverse of the mass coordinate: inf{x : m(x+,t) >= label}, for labels in [m(0,t), m(1,t)].
class MassInverse {
 public:
  MassInverse(const Scenario& s, double t, int table_n = 1024);
  double position(double label) const;
  double t() const { return t_; }

 private:
  const Scenario* s_;
  double t_;
  std::vector<double> x_, m_right_;
};

enum class Family { Initial, Left, Right };

struct EnergyOptions {
  double h = 1e-3;     // base quadrature step in the particle parameter
  int table_n = 1024;  // mass-inverse table resolution
};

// Traces X(η,t) (initial particles), Y(η,t) (left inflow), Z(η,t) (right
// inflow) at one time, with cumulative integrals ∫ w·u(X) and ∫ w·X, where
// w = ρ0 u0, ρ_bl u_bl², ρ_br u_br² respectively.
class EnergyContext {
 public:
  EnergyContext(const Scenario& s, double t, EnergyOptions opt = {});

  struct Node {
    double eta = 0.0;
    double x = 0.0;  // traced position
    double u = 0.0;  // u(x,t) at the traced position
  };

  double t() const { return t_; }
  const std::vector<Node>& nodes(Family f) const { return fam_[idx(f)].nodes; }

  // Integrals from 0 to eta of w, w·u(X), w·X.
  double weight_integral(Family f, double eta) const;
  double energy_integral(Family f, double eta) const;
  double position_integral(Family f, double eta) const;

  double label_of(Family f, double eta) const;
  double trace(Family f, double eta) const { return inv_.position(label_of(f, eta)); }

 private:
  struct Fam {
    std::vector<Node> nodes;
    std::vector<double> w;  // weight on [nodes[k], nodes[k+1]]
    std::vector<double> cw, ce, cx;
  };
  static int idx(Family f) { return static_cast<int>(f); }
  void build(Family f, const DataPair& p, double upper, double h);
  Node node_at(Family f, double eta) const;
  template <class Get>
  double partial(Family f, double eta, Get&& get) const;

  const Scenario* s_;
  double t_;
  MassInverse inv_;
  Fam fam_[3];
};

double E_at(const Scenario& s, double x, double t, const EnergyContext& ctx);
double H_at(const Scenario& s, double x, double t, const EnergyContext& ctx);

}  // namespace strip_psg
