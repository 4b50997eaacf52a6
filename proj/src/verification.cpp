#include "strip_psg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"
#include "strip_psg/parallel.hpp"

namespace strip_psg {

using nlohmann::json;

void CheckReport::observe(double violation, double x, double t) {
  ++samples;
  if (!(violation <= worst)) {  // NaN counts as a violation
    worst = std::isnan(violation) ? std::numeric_limits<double>::infinity() : violation;
    worst_x = x;
    worst_t = t;
  }
}

void CheckReport::finish() { pass = worst <= tolerance; }

namespace {

json report_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  j["location"] = {r.worst_x, r.worst_t};
  j["tolerance"] = r.tolerance;
  j["samples"] = r.samples;
  j["skipped"] = r.skipped;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// Per-index results merged in index order, so reports do not depend on
// scheduling.
struct Obs {
  double v = 0.0, x = 0.0, t = 0.0;
  bool used = false;
  bool skipped = false;
};

void merge(CheckReport& r, const std::vector<Obs>& obs) {
  for (const auto& o : obs) {
    if (o.skipped) ++r.skipped;
    if (o.used) r.observe(o.v, o.x, o.t);
  }
}

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double w = 1.0 - s * s;
  return w * w * w;
}

double bump_d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double w = 1.0 - s * s;
  return -6.0 * s * w * w;
}

// Gauss-Kronrod on 64 cells, each bisected until its error estimate drops
// below a fixed absolute tolerance. A jump costs about 30 levels.
template <class F>
double gk_piece(F& f, double a, double b, int depth) {
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= 1e-12 || depth >= 40 || b - a < 1e-13) return v;
  double mid = 0.5 * (a + b);
  return gk_piece(f, a, mid, depth + 1) + gk_piece(f, mid, b, depth + 1);
}

template <class F>
double integrate(F&& f, double a, double b) {
  if (a == b) return 0.0;
  const int cells = 64;
  double sum = 0.0;
  for (int i = 0; i < cells; ++i) {
    double lo = a + (b - a) * i / cells, hi = i + 1 == cells ? b : a + (b - a) * (i + 1) / cells;
    sum += gk_piece(f, lo, hi, 0);
  }
  return sum;
}

}  // namespace

std::string to_json(const CheckReport& r) { return report_json(r).dump(2); }

std::string to_json(const std::vector<CheckReport>& rs) {
  json j = json::array();
  for (const auto& r : rs) j.push_back(report_json(r));
  return j.dump(2);
}

double TestFunction::value(double x, double t) const {
  return amplitude * bump((x - x0) / rx) * bump((t - t0) / rt);
}
double TestFunction::dx(double x, double t) const {
  return amplitude * bump_d((x - x0) / rx) / rx * bump((t - t0) / rt);
}
double TestFunction::dt(double x, double t) const {
  return amplitude * bump((x - x0) / rx) * bump_d((t - t0) / rt) / rt;
}

// ---------------------------------------------------------------------------
// weak identities

std::vector<WeakResidual> weak_residuals(const Scenario& s, const std::vector<TestFunction>& phis,
                                         int nx, int nt) {
  if (nx < 2 || nt < 2) throw std::invalid_argument("weak_residuals: grid must be at least 2x2");
  std::vector<WeakResidual> out;
  for (const auto& phi : phis) {
    if (!(phi.rx > 0.0 && phi.rt > 0.0))
      throw std::invalid_argument("weak_residuals: radii must be positive");
    double xa = phi.x0 - phi.rx, xb = phi.x0 + phi.rx;
    double ta = phi.t0 - phi.rt, tb = phi.t0 + phi.rt;
    if (!(xa > 0.0 && xb < 1.0 && ta > 0.0 && tb <= s.t_max()))
      throw std::invalid_argument("weak_residuals: test function support must lie inside the strip");
    if (phi.amplitude == 0.0) {
      out.push_back({});
      continue;
    }
    double hx = (xb - xa) / nx, ht = (tb - ta) / nt;

    // per slice: a = ∫φ_t m dx, b = ∫φ u dm, c = ∫(φ_t u + φ_x u²) dm and their |.| versions
    struct Slice {
      double a = 0, b = 0, c = 0, aa = 0, ab = 0, ac = 0;
    };
    std::vector<Slice> slices(nt);
    parallel_for(nt, [&](std::size_t j) {
      double t = ta + (j + 0.5) * ht;
      Slice sl;
      auto atoms = find_atoms(s, t, xa, xb, nx);
      std::vector<double> m_edge(nx + 1);
      // cell i is (x_i, x_i+1]: right limits at both edges, and an atom on a
      // node belongs to the cell on its left
      auto edge = [&](int i) { return i == nx ? xb : xa + i * hx; };
      for (int i = 0; i <= nx; ++i) m_edge[i] = m_at(s, edge(i), t, Side::Right);
      std::vector<double> atom_in_cell(nx, 0.0);
      for (const auto& at : atoms) {
        int i = std::clamp(int(std::ceil((at.x - xa) / hx - 1e-9)) - 1, 0, nx - 1);
        atom_in_cell[i] += at.mass;
        double p = phi.value(at.x, t), pt = phi.dt(at.x, t), px = phi.dx(at.x, t);
        sl.b += p * at.u * at.mass;
        sl.ab += std::abs(p * at.u) * at.mass;
        sl.c += (pt * at.u + px * at.u * at.u) * at.mass;
        sl.ac += (std::abs(pt * at.u) + std::abs(px * at.u * at.u)) * at.mass;
      }
      for (int i = 0; i < nx; ++i) {
        double x = xa + (i + 0.5) * hx;
        auto c = classify(s, x, t);
        double u = u_from(s, c), m = m_from(s, c);
        double dm = std::max(0.0, m_edge[i + 1] - m_edge[i] - atom_in_cell[i]);
        double p = phi.value(x, t), pt = phi.dt(x, t), px = phi.dx(x, t);
        sl.a += pt * m * hx;
        sl.aa += std::abs(pt * m) * hx;
        sl.b += p * u * dm;
        sl.ab += std::abs(p * u) * dm;
        sl.c += (pt * u + px * u * u) * dm;
        sl.ac += (std::abs(pt * u) + std::abs(px * u * u)) * dm;
      }
      slices[j] = sl;
    });
    WeakResidual r;
    for (const auto& sl : slices) {
      r.r1 += (sl.a - sl.b) * ht;
      r.r2 += sl.c * ht;
      r.scale1 += (sl.aa + sl.ab) * ht;
      r.scale2 += sl.ac * ht;
    }
    out.push_back(r);
  }
  return out;
}

CheckReport check_weak(const Scenario& s, const std::vector<TestFunction>& phis, int nx, int nt,
                       double tol) {
  CheckReport r;
  r.name = "weak_identities";
  r.tolerance = tol;
  auto res = weak_residuals(s, phis, nx, nt);
  for (std::size_t i = 0; i < res.size(); ++i)
    r.observe(std::max(res[i].rel1(), res[i].rel2()), phis[i].x0, phis[i].t0);
  r.note = "relative to the absolute-value integrals of the terms";
  r.finish();
  return r;
}

// ---------------------------------------------------------------------------
// entropy and boundary traces

CheckReport check_entropy(const Scenario& s, double t, int nx) {
  if (!(t > 0.0)) throw std::invalid_argument("check_entropy: t must be > 0");
  CheckReport r;
  r.name = "entropy";
  r.tolerance = 1e-9 * (1.0 + s.speed_scale());
  const double strict = 1e-3 * s.speed_scale();
  for (double x : jump_points(s, t, nx)) {
    double ul = u_at(s, x, t, Side::Left), u = u_at(s, x, t), ur = u_at(s, x, t, Side::Right);
    double v = std::max(ur - u, u - ul);
    // a jump carrying mass must be strictly compressive
    double dm = m_at(s, x, t, Side::Right) - m_at(s, x, t, Side::Left);
    if (dm > 1e-3) v = std::max(v, strict - (ul - ur));
    r.observe(v, x, t);
  }
  // walls: either continuous or u(0,t) > u(0+,t), and u(1-,t) > u(1,t)
  r.observe(u_at(s, 0.0, t, Side::Right) - u_at(s, 0.0, t), 0.0, t);
  r.observe(u_at(s, 1.0, t) - u_at(s, 1.0, t, Side::Left), 1.0, t);
  r.finish();
  return r;
}

namespace {

double density_near(const Scenario& s, double x, double t) {
  double d = 1e-3 * std::min(x, 1.0 - x);
  return (m_at(s, x + d, t) - m_at(s, x - d, t)) / (2.0 * d);
}

bool near_breakpoint(const Scenario& s, double t) {
  for (double b : s.boundary_breakpoints())
    if (std::abs(b - t) < 1e-6) return true;
  return false;
}

}  // namespace

CheckReport check_boundary_traces(const Scenario& s, const std::vector<double>& times,
                                  double tol) {
  CheckReport r;
  r.name = "boundary_traces";
  r.tolerance = tol;
  const auto& d = s.data();
  const double eps[3] = {1e-2, 1e-3, 1e-4};
  double prev_left = -1.0, prev_right = -1.0;
  std::vector<double> ts(times);
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    if (!(t > 0.0) || near_breakpoint(s, t)) {
      ++r.skipped;
      prev_left = prev_right = -1.0;
      continue;
    }
    for (int wall = 0; wall < 2; ++wall) {
      double xw = wall == 0 ? 0.0 : 1.0;
      auto c = classify(s, xw, t);
      bool inflow = wall == 0 ? (!c.in_F && !c.in_Gbr) : (!c.in_F && !c.in_Gbl);
      double& prev = wall == 0 ? prev_left : prev_right;
      if (inflow) {
        prev = -1.0;
        double ub = wall == 0 ? d.u_bl.eval(t) : d.u_br.eval(t);
        double fb = ub * (wall == 0 ? d.rho_bl.eval(t) : d.rho_br.eval(t));
        double last_u = std::numeric_limits<double>::infinity(), last_f = last_u;
        for (double e : eps) {
          double x = wall == 0 ? e : 1.0 - e;
          double u = u_at(s, x, t);
          double eu = std::abs(u - ub), ef = std::abs(density_near(s, x, t) * u - fb);
          // errors may not grow as the wall is approached
          r.observe(std::max(eu - last_u, 0.0) + std::max(ef - last_f, 0.0), x, t);
          last_u = eu;
          last_f = ef;
        }
        // the trace itself at the middle distance
        double x = wall == 0 ? eps[1] : 1.0 - eps[1];
        double u = u_at(s, x, t);
        r.observe(std::max(std::abs(u - ub), std::abs(density_near(s, x, t) * u - fb)), x, t);
      } else {
        double atom = wall == 0 ? m_from(s, c, Side::Right) - m_from(s, c)
                                : m_from(s, c) - m_from(s, c, Side::Left);
        if (prev >= 0.0) r.observe(prev - atom, xw, t);
        prev = atom;
      }
    }
  }
  r.note = "inflow walls: |u-u_b| and |rho u - rho_b u_b| at eps=1e-3; atom walls: mass nondecreasing";
  r.finish();
  return r;
}

// ---------------------------------------------------------------------------
// potential identities

CheckReport check_mu_identities(const Scenario& s, const std::vector<Rect>& rects, double tol) {
  CheckReport r;
  r.name = "mu_identities";
  r.tolerance = tol;
  auto mu = [&](double x, double t) { return classify(s, x, t).mu; };
  std::vector<Obs> obs(4 * rects.size());
  parallel_for(obs.size(), [&](std::size_t k) {
    const Rect& q = rects[k / 4];
    int edge = int(k % 4);
    Obs o;
    o.used = true;
    if (edge < 2) {
      double t = edge == 0 ? q.t1 : q.t2;
      double lhs = integrate([&](double x) { return m_at(s, x, t); }, q.x1, q.x2);
      o.v = std::abs(lhs - (mu(q.x1, t) - mu(q.x2, t)));
      o.x = 0.5 * (q.x1 + q.x2);
      o.t = t;
    } else {
      double x = edge == 2 ? q.x1 : q.x2;
      double lhs = integrate([&](double t) { return q_at(s, x, t); }, q.t1, q.t2);
      o.v = std::abs(lhs - (mu(x, q.t2) - mu(x, q.t1)));
      o.x = x;
      o.t = 0.5 * (q.t1 + q.t2);
    }
    obs[k] = o;
  });
  merge(r, obs);
  r.finish();
  return r;
}

CheckReport check_rn_derivatives(const Scenario& s, double t, int nx) {
  if (!(t > 0.0)) throw std::invalid_argument("check_rn_derivatives: t must be > 0");
  if (nx < 1) throw std::invalid_argument("check_rn_derivatives: nx must be >= 1");
  CheckReport r;
  r.name = "rn_derivatives";
  const double scale = 1.0 + s.speed_scale();
  // q is exact; E carries the trace quadrature error (about 1e-9 absolute
  // per value), which is divided by the cell mass.
  r.tolerance = 1e-6 * scale * scale;
  EnergyContext ctx(s, t);
  const int sub = 16;
  std::vector<double> xs(nx + 1), m(nx + 1), q(nx + 1), e(nx + 1);
  parallel_for(nx + 1, [&](std::size_t i) {
    xs[i] = i == std::size_t(nx) ? 1.0 : double(i) / nx;
    auto c = classify(s, xs[i], t);
    m[i] = m_from(s, c);
    q[i] = q_from(s, c);
    e[i] = E_at(s, xs[i], t, ctx);
  });
  std::vector<Obs> obs(nx);
  parallel_for(nx, [&](std::size_t i) {
    Obs o;
    double dm = m[i + 1] - m[i];
    if (!(dm > 1e-8)) {
      o.skipped = true;
      obs[i] = o;
      return;
    }
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    auto take = [&](double u) {
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    };
    for (int k = 0; k <= sub; ++k) {
      double x = xs[i] + (xs[i + 1] - xs[i]) * k / sub;
      auto c = classify(s, x, t);
      take(u_from(s, c));
      if (x > 0.0) take(u_from(s, c, Side::Left));
      if (x < 1.0) take(u_from(s, c, Side::Right));
    }
    for (const auto& a : find_atoms(s, t, xs[i], xs[i + 1], 1, sub)) take(a.u);
    double kmin = umin < 0.0 && umax > 0.0 ? 0.0 : 0.5 * std::min(umin * umin, umax * umax);
    double kmax = 0.5 * std::max(umin * umin, umax * umax);
    double rq = (q[i + 1] - q[i]) / dm, re = (e[i + 1] - e[i]) / dm;
    o.used = true;
    o.v = std::max({umin - rq, rq - umax, kmin - re, re - kmax, 0.0});
    o.x = 0.5 * (xs[i] + xs[i + 1]);
    o.t = t;
    obs[i] = o;
  });
  merge(r, obs);
  r.note = "cells with mass <= 1e-8 skipped";
  r.finish();
  return r;
}

CheckReport check_H_identities(const Scenario& s, const std::vector<std::pair<double, double>>& pts,
                               double h) {
  if (!(h > 0.0)) throw std::invalid_argument("check_H_identities: h must be > 0");
  CheckReport r;
  r.name = "H_identities";
  r.tolerance = std::max(1e-3, 10.0 * h);
  for (auto [x, t] : pts)
    if (!(x - h > 0.0 && x + h < 1.0 && t - h > 0.0 && t + h <= s.t_max()))
      throw std::invalid_argument("check_H_identities: points must be interior");
  std::vector<Obs> obs(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    auto [x, t] = pts[k];
    Obs o;
    EnergyContext c0(s, t), cm(s, t - h), cp(s, t + h);
    double hx = (H_at(s, x + h, t, c0) - H_at(s, x - h, t, c0)) / (2 * h);
    double ht = (H_at(s, x, t + h, cp) - H_at(s, x, t - h, cm)) / (2 * h);
    o.used = true;
    o.v = std::max(std::abs(hx + q_at(s, x, t)), std::abs(ht - 2.0 * E_at(s, x, t, c0)));
    o.x = x;
    o.t = t;
    obs[k] = o;
  });
  merge(r, obs);
  r.finish();
  return r;
}

// ---------------------------------------------------------------------------
// minimizer structure

namespace {

// Distance of p from the bracket, plus the bracket width when the bracket
// holds two separated minima (a hump between its ends). A bracket that is
// merely flat to within the membership tolerance is not a second minimizer.
double segment_violation(const Scenario& s, PotentialKind k, const MinimizerBracket& b, double p,
                         double x, double t) {
  double v = std::max({0.0, b.lo - p, p - b.hi});
  if (b.hi > b.lo) {
    double eps = tolerances().min_rel * (1.0 + std::abs(b.value)), hump = 0.0;
    for (int i = 1; i < 8; ++i)
      hump = std::max(hump, potential_of(s, k, b.lo + (b.hi - b.lo) * i / 8.0, x, t) - b.value);
    if (hump > 10.0 * eps) v = std::max(v, b.hi - b.lo);
  }
  return v;
}

}  // namespace

CheckReport check_minimizer_lemmas(const Scenario& s, int n_samples, std::uint64_t seed) {
  CheckReport r;
  r.name = "minimizer_lemmas";
  r.tolerance = 1e-8;
  const double T = s.t_max();
  std::vector<Obs> obs(n_samples);
  parallel_for(n_samples, [&](std::size_t k) {
    std::mt19937_64 rng(seed * 1000003u + k);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double x1 = U(rng), x2 = U(rng);
    if (x1 > x2) std::swap(x1, x2);
    double t1 = (0.01 + 0.99 * U(rng)) * T, t2 = (0.01 + 0.99 * U(rng)) * T;
    if (t1 > t2) std::swap(t1, t2);
    double v = 0.0;
    // fixed x, t1 < t2: boundary minimizers move forward in time
    {
      auto a = minimize_Gbl(s, x1, t1), b = minimize_Gbl(s, x1, t2);
      v = std::max(v, a.hi - b.lo);
      auto c = minimize_Gbr(s, x1, t1), d = minimize_Gbr(s, x1, t2);
      v = std::max(v, c.hi - d.lo);
    }
    // fixed t, x1 < x2: y and xi move right, tau moves back
    {
      auto a = minimize_F(s, x1, t1), b = minimize_F(s, x2, t1);
      v = std::max(v, a.hi - b.lo);
      auto c = minimize_Gbr(s, x1, t1), d = minimize_Gbr(s, x2, t1);
      v = std::max(v, c.hi - d.lo);
      auto e = minimize_Gbl(s, x1, t1), f = minimize_Gbl(s, x2, t1);
      v = std::max(v, f.hi - e.lo);
    }
    // interior points of the segment to an extreme minimizer have that
    // minimizer as their unique one
    {
      double x = x1, t = t1, sgm = 0.01 + 0.98 * U(rng);
      bool take_hi = U(rng) < 0.5;
      auto f = minimize_F(s, x, t);
      double y1 = take_hi ? f.hi : f.lo;
      double xs = y1 + sgm * (x - y1), ts = sgm * t;
      v = std::max(v, segment_violation(s, PotentialKind::Initial, minimize_F(s, xs, ts), y1, xs, ts));
      auto l = minimize_Gbl(s, x, t);
      double tau = take_hi ? l.hi : l.lo;
      if (x > 0.0) {
        xs = sgm * x;
        ts = tau + sgm * (t - tau);
        v = std::max(v, segment_violation(s, PotentialKind::LeftBoundary, minimize_Gbl(s, xs, ts),
                                          tau, xs, ts));
      }
      auto rr = minimize_Gbr(s, x, t);
      double xi = take_hi ? rr.hi : rr.lo;
      if (x < 1.0) {
        xs = 1.0 + sgm * (x - 1.0);
        ts = xi + sgm * (t - xi);
        v = std::max(v, segment_violation(s, PotentialKind::RightBoundary, minimize_Gbr(s, xs, ts),
                                          xi, xs, ts));
      }
    }
    obs[k] = {v, x1, t1, true, false};
  });
  merge(r, obs);
  r.finish();
  return r;
}

CheckReport check_triangles(const Scenario& s, int n_samples, std::uint64_t seed) {
  CheckReport r;
  r.name = "triangles";
  r.tolerance = 1e-6;
  const double T = s.t_max();
  std::vector<Obs> obs(n_samples);
  parallel_for(n_samples, [&](std::size_t k) {
    std::mt19937_64 rng(seed * 7919u + k);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double t0 = (0.05 + 0.95 * U(rng)) * T;
    double v = 0.0;
    // two apexes at one time: triangles do not cross
    double x1 = U(rng), x2 = U(rng);
    if (x1 > x2) std::swap(x1, x2);
    if (x2 - x1 > 1e-9) {
      auto a = triangle_of(s, x1, t0), b = triangle_of(s, x2, t0);
      for (int i = 0; i <= 20; ++i) {
        double t = t0 * i / 20.0;
        auto [al, ar] = a.extent(t);
        auto [bl, br] = b.extent(t);
        if (al > ar || bl > br) continue;
        v = std::max(v, ar - bl);
      }
    }
    // a point below t0 lies in the triangle of some apex at t0
    double t = t0 * U(rng), x = U(rng);
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (triangle_of(s, mid, t0).extent(t).first <= x) lo = mid;
      else hi = mid;
    }
    bool covered = false;
    for (double a : {lo, hi, 0.0, 1.0})
      covered = covered || triangle_contains(triangle_of(s, a, t0), x, t, r.tolerance);
    if (!covered) v = std::max(v, 1.0);
    obs[k] = {v, x1, t0, true, false};
  });
  merge(r, obs);
  r.note = "non-crossing overlap and covering (1 = uncovered point)";
  r.finish();
  return r;
}

}  // namespace strip_psg
