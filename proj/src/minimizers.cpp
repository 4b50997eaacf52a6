#include "strip_psg/minimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace strip_psg {

Tolerances& tolerances() {
  static Tolerances tol;
  return tol;
}

namespace {

// Each potential is convex on every data piece (its derivative is an increasing
// affine function times a positive weight), so its global minimum over a
// closed range is attained at a piece end or at an in-piece root.
template <class Eval>
MinimizerBracket pick(const std::vector<double>& cands, Eval&& eval) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> vals(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    vals[i] = eval(cands[i]);
    best = std::min(best, vals[i]);
  }
  double eps = tolerances().min_rel * (1.0 + std::abs(best));
  MinimizerBracket b{best, std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (vals[i] <= best + eps) {
      b.lo = std::min(b.lo, cands[i]);
      b.hi = std::max(b.hi, cands[i]);
    }
  return b;
}

void require_xt(const Scenario& s, double x, double t) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x outside [0,1]");
  s.require_time(t);
}

// Candidate set on [0, upper] for a boundary potential whose in-piece root is root(u).
template <class Root>
std::vector<double> boundary_candidates(const DataPair& p, double upper, Root&& root) {
  std::vector<double> c{0.0, upper};
  const auto& nodes = p.nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i];
    if (a >= upper) break;
    double b = std::min(nodes[i + 1], upper);
    if (a > 0.0) c.push_back(a);
    double r = root(p.piece_u(i));
    if (r > a && r < b) c.push_back(r);
  }
  return c;
}

}  // namespace

MinimizerBracket minimize_F(const Scenario& s, double x, double t) {
  require_xt(s, x, t);
  const DataPair& p = s.initial();
  const auto& nodes = p.nodes();
  std::vector<double> c(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double r = x - t * p.piece_u(i);
    if (r > nodes[i] && r < nodes[i + 1]) c.push_back(r);
  }
  return pick(c, [&](double y) { return F_of(s, y, x, t); });
}

MinimizerBracket minimize_Gbl(const Scenario& s, double x, double t) {
  require_xt(s, x, t);
  if (t == 0.0) return {0.0, 0.0, 0.0};
  auto c = boundary_candidates(s.left(), t, [&](double u) { return t - x / u; });
  return pick(c, [&](double tau) { return Gbl_of(s, tau, x, t); });
}

MinimizerBracket minimize_Gbr(const Scenario& s, double x, double t) {
  require_xt(s, x, t);
  if (t == 0.0) return {F_of(s, 1.0, x, 0.0), 0.0, 0.0};
  auto c = boundary_candidates(s.right(), t, [&](double u) { return t - (x - 1.0) / u; });
  return pick(c, [&](double xi) { return Gbr_of(s, xi, x, t); });
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::F: return "F";
    case Regime::Gbl: return "Gbl";
    case Regime::Gbr: return "Gbr";
    case Regime::Tie_F_Gbl: return "F=Gbl";
    case Regime::Tie_F_Gbr: return "F=Gbr";
    case Regime::Tie_Gbl_Gbr: return "Gbl=Gbr";
    case Regime::Tie_All: return "F=Gbl=Gbr";
  }
  return "?";
}

RegimeClassification classify(const Scenario& s, double x, double t) {
  RegimeClassification c;
  c.x = x;
  c.t = t;
  if (t == 0.0) {
    require_xt(s, x, t);
    c.f = {F_of(s, x, x, 0.0), x, x};
    c.gbl = {0.0, 0.0, 0.0};
    c.gbr = {F_of(s, 1.0, x, 0.0), 0.0, 0.0};
    c.mu = c.f.value;
    c.winner = Regime::F;
    c.in_F = true;
    c.eps_tie = tolerances().tie_rel * (1.0 + std::abs(c.mu));
    c.margin = std::min(c.gbl.value, c.gbr.value) - c.mu;
    return c;
  }
  c.f = minimize_F(s, x, t);
  c.gbl = minimize_Gbl(s, x, t);
  c.gbr = minimize_Gbr(s, x, t);
  c.mu = std::min({c.f.value, c.gbl.value, c.gbr.value});
  c.eps_tie = tolerances().tie_rel * (1.0 + std::abs(c.mu));
  c.in_F = c.f.value <= c.mu + c.eps_tie;
  c.in_Gbl = c.gbl.value <= c.mu + c.eps_tie;
  c.in_Gbr = c.gbr.value <= c.mu + c.eps_tie;
  c.margin = std::numeric_limits<double>::infinity();
  if (!c.in_F) c.margin = std::min(c.margin, c.f.value - c.mu);
  if (!c.in_Gbl) c.margin = std::min(c.margin, c.gbl.value - c.mu);
  if (!c.in_Gbr) c.margin = std::min(c.margin, c.gbr.value - c.mu);
  if (c.in_F && c.in_Gbl && c.in_Gbr) c.winner = Regime::Tie_All;
  else if (c.in_F && c.in_Gbl) c.winner = Regime::Tie_F_Gbl;
  else if (c.in_F && c.in_Gbr) c.winner = Regime::Tie_F_Gbr;
  else if (c.in_Gbl && c.in_Gbr) c.winner = Regime::Tie_Gbl_Gbr;
  else if (c.in_F) c.winner = Regime::F;
  else if (c.in_Gbl) c.winner = Regime::Gbl;
  else c.winner = Regime::Gbr;
  return c;
}

}  // namespace strip_psg
