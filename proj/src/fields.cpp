#include "strip_psg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace strip_psg {

namespace {

enum class Pot { F, Gbl, Gbr };

struct Choice {
  Pot pot;
  double param;
};

Choice choose(const RegimeClassification& c, Side side) {
  if (c.t == 0.0) return {Pot::F, c.x};
  if (side == Side::Left && c.x == 0.0) side = Side::Principal;
  if (side == Side::Right && c.x == 1.0) side = Side::Principal;
  switch (side) {
    case Side::Left:
      if (c.in_Gbl) return {Pot::Gbl, c.gbl.hi};
      if (c.in_F) return {Pot::F, c.f.lo};
      return {Pot::Gbr, c.gbr.lo};
    case Side::Right:
      if (c.in_Gbr) return {Pot::Gbr, c.gbr.hi};
      if (c.in_F) return {Pot::F, c.f.hi};
      return {Pot::Gbl, c.gbl.lo};
    case Side::Principal:
      break;
  }
  if (c.x == 0.0) return {Pot::Gbl, c.gbl.lo};
  if (c.x == 1.0) return {Pot::Gbr, c.gbr.lo};
  if (c.in_F) return {Pot::F, c.f.lo};
  if (c.in_Gbl) return {Pot::Gbl, c.gbl.lo};
  return {Pot::Gbr, c.gbr.lo};
}

// order 0: mass coordinate, order 1: momentum coordinate
double cumulative_branch(const Scenario& s, Choice ch, int order) {
  switch (ch.pot) {
    case Pot::F: return s.initial().cumulative(order, 0, ch.param);
    case Pot::Gbl: return -s.left().cumulative(order + 1, 0, ch.param);
    case Pot::Gbr:
      return -s.right().cumulative(order + 1, 0, ch.param) +
             (order == 0 ? s.initial_mass() : s.initial_momentum());
  }
  return 0.0;
}

constexpr double kDivisionGuard = 1e-14;

double u_left_point(const Scenario& s, double x, double t, double tau) {
  double d = t - tau;
  // A minimizer at tau = t means a characteristic that has just left the
  // wall; its speed is the inflow velocity there.
  if (d < kDivisionGuard) return s.data().u_bl.left_limit(t);
  return x / d;
}

double u_right_point(const Scenario& s, double x, double t, double xi) {
  double d = t - xi;
  if (d < kDivisionGuard) return s.data().u_br.left_limit(t);
  return (x - 1.0) / d;
}

double ratio(double num, double den) { return num / den; }

// Branch on the far left (smallest m) or far right (largest m) of a tie,
// without the wall overrides of choose().
Choice extreme(const RegimeClassification& c, Side side) {
  if (side == Side::Left) {
    if (c.in_Gbl) return {Pot::Gbl, c.gbl.hi};
    if (c.in_F) return {Pot::F, c.f.lo};
    return {Pot::Gbr, c.gbr.lo};
  }
  if (c.in_Gbr) return {Pot::Gbr, c.gbr.hi};
  if (c.in_F) return {Pot::F, c.f.hi};
  return {Pot::Gbl, c.gbl.lo};
}

double point_velocity(const Scenario& s, double x, double t, Choice ch) {
  switch (ch.pot) {
    case Pot::F: return (x - ch.param) / t;
    case Pot::Gbl: return u_left_point(s, x, t, ch.param);
    case Pot::Gbr: return u_right_point(s, x, t, ch.param);
  }
  return 0.0;
}

double u_branch(const Scenario& s, const RegimeClassification& c, Regime r) {
  const double x = c.x, t = c.t;
  const DataPair& I = s.initial();
  const DataPair& L = s.left();
  const DataPair& R = s.right();
  switch (r) {
    case Regime::F:
      if (c.f.unique()) return (x - c.f.lo) / t;
      return ratio(I.integral(1, 0, c.f.lo, c.f.hi), I.integral(0, 0, c.f.lo, c.f.hi));
    case Regime::Gbl:
      if (c.gbl.unique()) return u_left_point(s, x, t, c.gbl.lo);
      return ratio(L.integral(2, 0, c.gbl.lo, c.gbl.hi), L.integral(1, 0, c.gbl.lo, c.gbl.hi));
    case Regime::Gbr:
      if (c.gbr.unique()) return u_right_point(s, x, t, c.gbr.lo);
      return ratio(R.integral(2, 0, c.gbr.lo, c.gbr.hi), R.integral(1, 0, c.gbr.lo, c.gbr.hi));
    case Regime::Tie_F_Gbl:
    case Regime::Tie_F_Gbr:
    case Regime::Tie_Gbl_Gbr:
    case Regime::Tie_All: {
      // Momentum over mass of everything between the extreme branches, i.e.
      // the atom's velocity. Inside the thin tie band the mass jump is tiny
      // and the ratio is clamped to the one-sided values; with no mass at
      // all (a fan) both one-sided values agree.
      Choice l = extreme(c, Side::Left), rr = extreme(c, Side::Right);
      double ul = point_velocity(s, x, t, l), ur = point_velocity(s, x, t, rr);
      double dm = cumulative_branch(s, rr, 0) - cumulative_branch(s, l, 0);
      if (!(dm > 0.0)) return 0.5 * (ul + ur);
      double v = (cumulative_branch(s, rr, 1) - cumulative_branch(s, l, 1)) / dm;
      return std::clamp(v, std::min(ul, ur), std::max(ul, ur));
    }
  }
  return 0.0;
}

}  // namespace

bool left_wall_atom_regime(const RegimeClassification& c) { return c.in_F || c.in_Gbr; }
bool right_wall_atom_regime(const RegimeClassification& c) { return c.in_F || c.in_Gbl; }

double u_from(const Scenario& s, const RegimeClassification& c) {
  if (c.t == 0.0) return s.data().u0.eval(c.x);
  if (c.x == 0.0) {
    if (!c.in_F && !c.in_Gbr) return s.data().u_bl.eval(c.t);
    if (!c.in_Gbl) return 0.0;
  } else if (c.x == 1.0) {
    if (!c.in_F && !c.in_Gbl) return s.data().u_br.eval(c.t);
    if (!c.in_Gbr) return 0.0;
  }
  return u_branch(s, c, c.winner);
}

double u_at(const Scenario& s, double x, double t) { return u_from(s, classify(s, x, t)); }

double u_from(const Scenario& s, const RegimeClassification& c, Side side) {
  if (side == Side::Principal) return u_from(s, c);
  if (c.t == 0.0)
    return side == Side::Left && c.x > 0.0 ? s.data().u0.left_limit(c.x) : s.data().u0.eval(c.x);
  if ((side == Side::Left && c.x == 0.0) || (side == Side::Right && c.x == 1.0))
    return u_from(s, c);
  Choice ch = choose(c, side);
  switch (ch.pot) {
    case Pot::F: return (c.x - ch.param) / c.t;
    case Pot::Gbl: return u_left_point(s, c.x, c.t, ch.param);
    case Pot::Gbr: return u_right_point(s, c.x, c.t, ch.param);
  }
  return 0.0;
}

double u_at(const Scenario& s, double x, double t, Side side) {
  return u_from(s, classify(s, x, t), side);
}

double m_from(const Scenario& s, const RegimeClassification& c, Side side) {
  return cumulative_branch(s, choose(c, side), 0);
}

double m_at(const Scenario& s, double x, double t, Side side) {
  return m_from(s, classify(s, x, t), side);
}

double q_from(const Scenario& s, const RegimeClassification& c, Side side) {
  return cumulative_branch(s, choose(c, side), 1);
}

double q_at(const Scenario& s, double x, double t, Side side) {
  return q_from(s, classify(s, x, t), side);
}

FieldSample sample_field(const Scenario& s, double x, double t) {
  FieldSample f;
  f.x = x;
  f.t = t;
  f.regime = classify(s, x, t);
  f.u = u_from(s, f.regime);
  f.m = m_from(s, f.regime);
  return f;
}

// ---------------------------------------------------------------------------
// atoms

double MeasureOnStrip::absolutely_continuous_mass() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) sum += density[i] * (grid[i + 1] - grid[i]);
  return sum;
}

double MeasureOnStrip::atom_mass() const {
  double sum = left_atom + right_atom;
  for (const auto& a : interior_atoms) sum += a.mass;
  return sum;
}

namespace {

struct MPoint {
  double x;
  double ml, mr;  // m(x-), m(x+)
};

class AtomFinder {
 public:
  AtomFinder(const Scenario& s, double t)
      : s_(s), t_(t), rho_max_(s.max_density()),
        thr_(tolerances().atom_rel * s.total_mass(t)) {}

  double threshold() const { return thr_; }

  MPoint at(double x) const {
    auto c = classify(s_, x, t_);
    return {x, m_from(s_, c, Side::Left), m_from(s_, c, Side::Right)};
  }

  void node(const MPoint& p, std::vector<Atom>& out) const {
    if (p.x > 0.0 && p.x < 1.0 && p.mr - p.ml > thr_)
      out.push_back({p.x, p.mr - p.ml, u_at(s_, p.x, t_)});
  }

  // Atoms in the open interval (a.x, b.x).
  void open(const MPoint& a, const MPoint& b, std::vector<Atom>& out, int depth = 0) const {
    if (depth > 64 || !(b.x > a.x)) return;
    if (excess(a, b) <= thr_) return;
    MPoint lo = a, hi = b;
    for (int it = 0; it < 200; ++it) {
      if (hi.x - lo.x <= 4e-16 * std::max(1.0, std::abs(hi.x))) break;
      double mid = 0.5 * (lo.x + hi.x);
      if (!(mid > lo.x && mid < hi.x)) break;
      MPoint pm = at(mid);
      if (pm.mr - pm.ml > thr_) {
        // landed on the atom itself
        out.push_back({mid, pm.mr - pm.ml, u_at(s_, mid, t_)});
        open(a, {mid, pm.ml, pm.ml}, out, depth + 1);
        open({mid, pm.mr, pm.mr}, b, out, depth + 1);
        return;
      }
      if (excess(lo, pm) >= excess(pm, hi)) hi = pm;
      else lo = pm;
    }
    double mass = hi.ml - lo.mr;
    if (mass <= thr_) return;
    double x = 0.5 * (lo.x + hi.x);
    out.push_back({x, mass, u_at(s_, x, t_)});
    open(a, {lo.x, lo.ml, lo.ml}, out, depth + 1);
    open({hi.x, hi.mr, hi.mr}, b, out, depth + 1);
  }

 private:
  // Mass in (a,b) beyond what the largest data density could supply.
  double excess(const MPoint& a, const MPoint& b) const {
    double slack = 1e-12 * (1.0 + std::abs(a.mr) + std::abs(b.ml));
    return b.ml - a.mr - rho_max_ * (b.x - a.x) - slack;
  }

  const Scenario& s_;
  double t_;
  double rho_max_;
  double thr_;
};

std::vector<Atom> scan(const AtomFinder& f, double a, double b, int n, int sub,
                       std::vector<MPoint>* nodes_out) {
  if (n < 1 || sub < 1) throw std::invalid_argument("find_atoms: n and subcells must be >= 1");
  std::vector<Atom> atoms;
  std::vector<MPoint> nodes(n + 1);
  for (int i = 0; i <= n; ++i) nodes[i] = f.at(i == n ? b : a + (b - a) * i / n);
  for (const auto& p : nodes) f.node(p, atoms);
  for (int i = 0; i < n; ++i) {
    MPoint prev = nodes[i];
    for (int j = 1; j <= sub; ++j) {
      MPoint cur = j == sub ? nodes[i + 1]
                            : f.at(nodes[i].x + (nodes[i + 1].x - nodes[i].x) * j / sub);
      if (j < sub) f.node(cur, atoms);
      f.open(prev, cur, atoms);
      prev = cur;
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  if (nodes_out) *nodes_out = std::move(nodes);
  return atoms;
}

}  // namespace

std::vector<Atom> find_atoms(const Scenario& s, double t, double a, double b, int n,
                             int subcells) {
  if (!(t > 0.0)) throw std::invalid_argument("find_atoms: t must be > 0");
  if (!(a >= 0.0 && b <= 1.0 && a < b)) throw std::invalid_argument("find_atoms: bad interval");
  AtomFinder f(s, t);
  return scan(f, a, b, n, subcells, nullptr);
}

MeasureOnStrip measure_at(const Scenario& s, double t, int grid_n, int subcells) {
  if (!(t > 0.0)) throw std::invalid_argument("measure_at: t must be > 0");
  if (grid_n < 16) throw std::invalid_argument("measure_at: grid_n must be >= 16");
  s.require_time(t);
  AtomFinder f(s, t);
  MeasureOnStrip out;
  out.t = t;
  out.threshold = f.threshold();
  std::vector<MPoint> nodes;
  out.interior_atoms = scan(f, 0.0, 1.0, grid_n, subcells, &nodes);
  out.grid.resize(grid_n + 1);
  out.density.assign(grid_n, 0.0);
  for (int i = 0; i <= grid_n; ++i) out.grid[i] = nodes[i].x;
  std::size_t k = 0;
  for (int i = 0; i < grid_n; ++i) {
    double mass = nodes[i + 1].ml - nodes[i].mr;
    while (k < out.interior_atoms.size() && out.interior_atoms[k].x <= nodes[i].x) ++k;
    for (std::size_t j = k; j < out.interior_atoms.size() && out.interior_atoms[j].x < nodes[i + 1].x; ++j)
      mass -= out.interior_atoms[j].mass;
    out.density[i] = mass / (nodes[i + 1].x - nodes[i].x);
  }
  auto c0 = classify(s, 0.0, t);
  auto c1 = classify(s, 1.0, t);
  out.m_zero = m_from(s, c0);
  out.m_one = m_from(s, c1);
  if (left_wall_atom_regime(c0)) out.left_atom = m_from(s, c0, Side::Right) - out.m_zero;
  if (right_wall_atom_regime(c1)) out.right_atom = out.m_one - m_from(s, c1, Side::Left);
  return out;
}

// ---------------------------------------------------------------------------
// mass inverse and energy traces

MassInverse::MassInverse(const Scenario& s, double t, int table_n) : s_(&s), t_(t) {
  if (table_n < 2) throw std::invalid_argument("MassInverse: table_n must be >= 2");
  x_.resize(table_n + 1);
  m_right_.resize(table_n + 1);
  for (int i = 0; i <= table_n; ++i) {
    x_[i] = i == table_n ? 1.0 : double(i) / table_n;
    m_right_[i] = m_at(s, x_[i], t, Side::Right);
  }
}

double MassInverse::position(double label) const {
  auto it = std::lower_bound(m_right_.begin(), m_right_.end(), label);
  if (it == m_right_.begin()) return 0.0;
  if (it == m_right_.end()) return 1.0;
  std::size_t i = static_cast<std::size_t>(it - m_right_.begin());
  double lo = x_[i - 1], hi = x_[i];
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (m_at(*s_, mid, t_, Side::Right) >= label) hi = mid;
    else lo = mid;
  }
  return hi;
}

EnergyContext::EnergyContext(const Scenario& s, double t, EnergyOptions opt)
    : s_(&s), t_(t), inv_(s, t, opt.table_n) {
  if (!(opt.h > 0.0)) throw std::invalid_argument("EnergyContext: h must be > 0");
  s.require_time(t);
  build(Family::Initial, s.initial(), 1.0, opt.h);
  build(Family::Left, s.left(), t, opt.h);
  build(Family::Right, s.right(), t, opt.h);
}

double EnergyContext::label_of(Family f, double eta) const {
  switch (f) {
    case Family::Initial: return s_->initial().cumulative(0, 0, eta);
    case Family::Left: return -s_->left().cumulative(1, 0, eta);
    case Family::Right: return s_->initial_mass() - s_->right().cumulative(1, 0, eta);
  }
  return 0.0;
}

EnergyContext::Node EnergyContext::node_at(Family f, double eta) const {
  Node n;
  n.eta = eta;
  n.x = trace(f, eta);
  n.u = t_ == 0.0 ? s_->data().u0.eval(n.x) : u_at(*s_, n.x, t_);
  return n;
}

void EnergyContext::build(Family f, const DataPair& p, double upper, double h) {
  Fam& fam = fam_[idx(f)];
  if (upper <= 0.0) {
    fam.nodes = {node_at(f, 0.0)};
    fam.cw = fam.ce = fam.cx = {0.0};
    return;
  }
  std::vector<double> etas;
  int n = std::max(1, int(std::ceil(upper / h)));
  for (int i = 0; i <= n; ++i) etas.push_back(i == n ? upper : upper * i / n);
  for (double b : p.nodes())
    if (b > 0.0 && b < upper) etas.push_back(b);
  std::sort(etas.begin(), etas.end());
  etas.erase(std::unique(etas.begin(), etas.end()), etas.end());

  // The traced velocity is piecewise constant in η (varying smoothly only
  // inside the thin tie bands around shocks) and the traced position
  // piecewise linear. Bisect until the trapezoid error on each interval is
  // under a fixed absolute budget.
  double wmax = 0.0;
  for (std::size_t i = 0; i < p.piece_count(); ++i)
    wmax = std::max(wmax, std::abs(p.piece_rho(i) * std::pow(p.piece_u(i), f == Family::Initial ? 1 : 2)));
  auto clean = [wmax](const Node& a, const Node& m, const Node& b) {
    double dev = std::abs(m.u - 0.5 * (a.u + b.u)) + std::abs(m.x - 0.5 * (a.x + b.x));
    return wmax * (b.eta - a.eta) * dev <= 1e-14;
  };
  const double min_width = 1e-13 * upper;
  std::vector<Node> out{node_at(f, etas[0])};
  auto refine = [&](auto&& self, const Node& a, const Node& b, int depth) -> void {
    double mid = 0.5 * (a.eta + b.eta);
    if (depth >= 60 || b.eta - a.eta <= min_width || !(mid > a.eta && mid < b.eta)) {
      out.push_back(b);
      return;
    }
    Node m = node_at(f, mid);
    if (clean(a, m, b)) {
      out.push_back(b);
      return;
    }
    self(self, a, m, depth + 1);
    self(self, m, b, depth + 1);
  };
  for (std::size_t i = 1; i < etas.size(); ++i) {
    Node b = node_at(f, etas[i]);
    Node a = out.back();
    refine(refine, a, b, 0);
  }
  fam.nodes = std::move(out);
  const int k = f == Family::Initial ? 1 : 2;
  std::size_t m = fam.nodes.size();
  fam.w.assign(m > 0 ? m - 1 : 0, 0.0);
  fam.cw.assign(m, 0.0);
  fam.ce.assign(m, 0.0);
  fam.cx.assign(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const Node& a = fam.nodes[i];
    const Node& b = fam.nodes[i + 1];
    std::size_t piece = p.piece_of(0.5 * (a.eta + b.eta));
    double u = p.piece_u(piece);
    double w = p.piece_rho(piece) * (k == 1 ? u : u * u);
    double d = b.eta - a.eta;
    fam.w[i] = w;
    fam.cw[i + 1] = fam.cw[i] + w * d;
    fam.ce[i + 1] = fam.ce[i] + w * 0.5 * (a.u + b.u) * d;
    fam.cx[i + 1] = fam.cx[i] + w * 0.5 * (a.x + b.x) * d;
  }
}

template <class Get>
double EnergyContext::partial(Family f, double eta, Get&& get) const {
  const Fam& fam = fam_[idx(f)];
  const auto& nodes = fam.nodes;
  if (!(eta >= nodes.front().eta - 1e-15 && eta <= nodes.back().eta + 1e-12))
    throw std::invalid_argument("EnergyContext: parameter " + std::to_string(eta) +
                                " outside the traced range");
  auto it = std::upper_bound(nodes.begin(), nodes.end(), eta,
                             [](double v, const Node& n) { return v < n.eta; });
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (i == 0) return 0.0;
  --i;
  if (i + 1 >= nodes.size()) return get(fam, i, 1.0, 0.0);
  const Node& a = nodes[i];
  const Node& b = nodes[i + 1];
  double d = eta - a.eta;
  double frac = d / (b.eta - a.eta);
  return get(fam, i, frac, d);
}

double EnergyContext::weight_integral(Family f, double eta) const {
  return partial(f, eta, [&](const Fam& fam, std::size_t i, double, double d) {
    return fam.cw[i] + (i < fam.w.size() ? fam.w[i] * d : 0.0);
  });
}

double EnergyContext::energy_integral(Family f, double eta) const {
  return partial(f, eta, [&](const Fam& fam, std::size_t i, double frac, double d) {
    if (i >= fam.w.size()) return fam.ce[i];
    double ua = fam.nodes[i].u, ub = fam.nodes[i + 1].u;
    double ue = ua + (ub - ua) * frac;
    return fam.ce[i] + fam.w[i] * 0.5 * (ua + ue) * d;
  });
}

double EnergyContext::position_integral(Family f, double eta) const {
  return partial(f, eta, [&](const Fam& fam, std::size_t i, double frac, double d) {
    if (i >= fam.w.size()) return fam.cx[i];
    double xa = fam.nodes[i].x, xb = fam.nodes[i + 1].x;
    double xe = xa + (xb - xa) * frac;
    return fam.cx[i] + fam.w[i] * 0.5 * (xa + xe) * d;
  });
}

namespace {

void require_ctx(const EnergyContext& ctx, double t) {
  if (ctx.t() != t)
    throw std::invalid_argument("EnergyContext traced at t=" + std::to_string(ctx.t()) +
                                ", queried at t=" + std::to_string(t));
}

}  // namespace

double E_at(const Scenario& s, double x, double t, const EnergyContext& ctx) {
  require_ctx(ctx, t);
  auto c = classify(s, x, t);
  Choice ch = choose(c, Side::Principal);
  switch (ch.pot) {
    case Pot::F: return 0.5 * ctx.energy_integral(Family::Initial, ch.param);
    case Pot::Gbl: return -0.5 * ctx.energy_integral(Family::Left, ch.param);
    case Pot::Gbr:
      return -0.5 * ctx.energy_integral(Family::Right, ch.param) +
             0.5 * ctx.energy_integral(Family::Initial, 1.0);
  }
  return 0.0;
}

double H_at(const Scenario& s, double x, double t, const EnergyContext& ctx) {
  require_ctx(ctx, t);
  auto c = classify(s, x, t);
  Choice ch = choose(c, Side::Principal);
  auto moment = [&](Family f, double eta) {
    return ctx.position_integral(f, eta) - x * ctx.weight_integral(f, eta);
  };
  switch (ch.pot) {
    case Pot::F: return moment(Family::Initial, ch.param);
    case Pot::Gbl: return -moment(Family::Left, ch.param);
    case Pot::Gbr: return -moment(Family::Right, ch.param) + moment(Family::Initial, 1.0);
  }
  return 0.0;
}

}  // namespace strip_psg
