#pragma once

#include <string>

#include "strip_psg/potentials.hpp"

namespace strip_psg {

// Process-wide numerical tolerances. Set once at startup (the CLI exposes
// them as --tol-* flags); everything else only reads them.
struct Tolerances {
  double min_rel = 1e-10;   // argmin-set membership: v <= vmin + min_rel (1 + |vmin|)
  double tie_rel = 1e-9;    // regime ties: v <= mu + tie_rel (1 + |mu|)
  double atom_rel = 1e-6;   // atom threshold relative to total mass
  double jump_rel = 1e-3;   // u-jump threshold relative to the data speed range
};
Tolerances& tolerances();

struct MinimizerBracket {
  double value = 0.0;
  double lo = 0.0;  // leftmost minimizer
  double hi = 0.0;  // rightmost minimizer
  bool unique() const { return lo == hi; }
};

MinimizerBracket minimize_F(const Scenario& s, double x, double t);
MinimizerBracket minimize_Gbl(const Scenario& s, double x, double t);
MinimizerBracket minimize_Gbr(const Scenario& s, double x, double t);

enum class Regime { F, Gbl, Gbr, Tie_F_Gbl, Tie_F_Gbr, Tie_Gbl_Gbr, Tie_All };
std::string to_string(Regime r);

struct RegimeClassification {
  double x = 0.0, t = 0.0;
  double mu = 0.0;
  Regime winner = Regime::F;
  MinimizerBracket f, gbl, gbr;
  double eps_tie = 0.0;
  // Distance from mu to the nearest potential outside the tied set (infinity if all tie).
  double margin = 0.0;
  // Which potentials attain mu (within eps_tie).
  bool in_F = false, in_Gbl = false, in_Gbr = false;

  bool is_tie() const { return (int(in_F) + int(in_Gbl) + int(in_Gbr)) > 1; }
  bool fragile() const { return margin < 10.0 * eps_tie; }
};

RegimeClassification classify(const Scenario& s, double x, double t);

}  // namespace strip_psg
