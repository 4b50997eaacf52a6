#include "strip_psg/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strip_psg/parallel.hpp"
#include "strip_psg/potentials.hpp"

namespace strip_psg {

bool left_capture(const RegimeClassification& c) { return !c.in_Gbl; }
bool right_capture(const RegimeClassification& c) { return !c.in_Gbr; }

CurveVelocity curve_velocity_detail(const Scenario& s, double x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("curve_velocity: t must be > 0");
  CurveVelocity v;
  v.regime = classify(s, x, t);
  const auto& c = v.regime;
  if ((x == 0.0 && left_capture(c)) || (x == 1.0 && right_capture(c))) {
    v.value = 0.0;
    return v;
  }
  v.value = u_from(s, c);
  if (c.winner == Regime::Tie_F_Gbl && ((c.f.hi == 0.0) != (c.gbl.hi == 0.0)))
    v.alternative = x / t;
  else if (c.winner == Regime::Tie_F_Gbr && ((c.f.lo == 1.0) != (c.gbr.hi == 0.0)))
    v.alternative = (x - 1.0) / t;
  if (v.alternative)
    v.conflict = std::abs(*v.alternative - v.value) > 1e-6 * (1.0 + std::abs(v.value));
  return v;
}

double curve_velocity(const Scenario& s, double x, double t) {
  return curve_velocity_detail(s, x, t).value;
}

namespace {

struct Tracer {
  const Scenario& s;
  int conflicts = 0;

  double vel(double x, double t) {
    auto v = curve_velocity_detail(s, x, t);
    if (v.conflict) ++conflicts;
    return v.value;
  }

  // One midpoint step; steps whose two stage velocities differ by more than
  // 10 are split so the regime change is resolved.
  double step(double x, double t, double h, int depth = 0) {
    double v1 = vel(x, t);
    double xm = std::clamp(x + 0.5 * h * v1, 0.0, 1.0);
    double v2 = vel(xm, t + 0.5 * h);
    if (std::abs(v2 - v1) > 10.0 && depth < 12) {
      double xh = step(x, t, 0.5 * h, depth + 1);
      return step(xh, t + 0.5 * h, 0.5 * h, depth + 1);
    }
    return std::clamp(x + h * v2, 0.0, 1.0);
  }
};

}  // namespace

CharCurve trace_curve(const Scenario& s, double x1, double t1, double t_end, double dt) {
  if (!(t1 > 0.0 && t1 < t_end && t_end <= s.t_max()))
    throw std::invalid_argument("trace_curve: need 0 < t1 < t_end <= t_max");
  if (!(dt > 0.0)) throw std::invalid_argument("trace_curve: dt must be > 0");
  if (!(x1 >= 0.0 && x1 <= 1.0)) throw std::invalid_argument("trace_curve: x1 outside [0,1]");
  CharCurve curve;
  if (x1 == 0.0) curve.origin = Origin::LeftBoundary;
  if (x1 == 1.0) curve.origin = Origin::RightBoundary;
  curve.origin_param = curve.origin == Origin::Interior ? x1 : t1;

  Tracer tr{s};
  double x = x1, t = t1;
  curve.samples.emplace_back(t, x);
  auto check_capture = [&](double xc, double tc) {
    if (xc == 0.0 && left_capture(classify(s, 0.0, tc))) curve.captured = {{Wall::Left, tc}};
    if (xc == 1.0 && right_capture(classify(s, 1.0, tc))) curve.captured = {{Wall::Right, tc}};
  };
  try {
    check_capture(x, t);
    long n = static_cast<long>(std::ceil((t_end - t1) / dt - 1e-9));
    for (long k = 1; k <= n; ++k) {
      double tn = k == n ? t_end : t1 + k * dt;
      double h = tn - t;
      if (curve.captured) {
        t = tn;
        curve.samples.emplace_back(t, x);
        continue;
      }
      // snap onto a wall that is within one step and holds the curve; the
      // midpoint stage alone would stall there since the wall velocity is 0
      double v = tr.vel(x, t);
      double xn;
      if (v < 0.0 && x <= h * -v && left_capture(classify(s, 0.0, tn)))
        xn = 0.0;
      else if (v > 0.0 && 1.0 - x <= h * v && right_capture(classify(s, 1.0, tn)))
        xn = 1.0;
      else
        xn = tr.step(x, t, h);
      x = xn;
      t = tn;
      curve.samples.emplace_back(t, x);
      check_capture(x, t);
    }
  } catch (const std::domain_error& e) {
    curve.diagnostic = "step failed at t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                       ": " + e.what();
  }
  curve.fan_conflicts = tr.conflicts;
  return curve;
}

// ---------------------------------------------------------------------------
// triangles

double Triangle::Line::at(double x0, double t0, double t) const {
  double span = t0 - foot_t;
  if (!(span > 0.0)) return x0;
  return x0 + (foot_x - x0) * (t0 - t) / span;
}

std::pair<double, double> Triangle::extent(double t) const {
  if (!applicable || t > t0 || t < 0.0) return {1.0, 0.0};
  double lo = left.present ? left.at(x0, t0, t) : 0.0;
  double hi = right.present ? right.at(x0, t0, t) : 1.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

std::string case_name(const Triangle& tri) {
  static const char* roman[] = {"", "i", "ii", "iii", "iv", "v", "vi"};
  std::string r = tri.case_id >= 1 && tri.case_id <= 6 ? roman[tri.case_id] : "?";
  if (!tri.applicable) return "boundary-inflow";
  return (tri.boundary ? "boundary-" : "interior-") + r;
}

Triangle triangle_of(const Scenario& s, double x0, double t0) {
  if (!(t0 > 0.0)) throw std::invalid_argument("triangle_of: t0 must be > 0");
  auto c = classify(s, x0, t0);
  Triangle tri;
  tri.x0 = x0;
  tri.t0 = t0;
  tri.regime = c.winner;
  tri.f = c.f;
  tri.gbl = c.gbl;
  tri.gbr = c.gbr;
  auto initial = [](double y) { return Triangle::Line{true, y, 0.0}; };
  auto left_wall = [](double tau) { return Triangle::Line{true, 0.0, tau}; };
  auto right_wall = [](double xi) { return Triangle::Line{true, 1.0, xi}; };

  if (x0 == 0.0 || x0 == 1.0) {
    tri.boundary = true;
    bool at_left = x0 == 0.0;
    if (at_left ? c.in_Gbl : c.in_Gbr) {
      tri.applicable = false;
      return tri;
    }
    if (at_left) {
      tri.case_id = c.in_F ? 1 : 3;
      tri.right = c.in_F ? initial(c.f.hi) : right_wall(c.gbr.hi);
    } else {
      tri.case_id = c.in_F ? 2 : 4;
      tri.left = c.in_F ? initial(c.f.lo) : left_wall(c.gbl.hi);
    }
    return tri;
  }

  switch (c.winner) {
    case Regime::F:
      tri.case_id = 1;
      tri.left = initial(c.f.lo);
      tri.right = initial(c.f.hi);
      break;
    case Regime::Gbl:
      tri.case_id = 2;
      tri.left = left_wall(c.gbl.hi);
      tri.right = left_wall(c.gbl.lo);
      break;
    case Regime::Gbr:
      tri.case_id = 3;
      tri.left = right_wall(c.gbr.lo);
      tri.right = right_wall(c.gbr.hi);
      break;
    case Regime::Tie_Gbl_Gbr:
    case Regime::Tie_All:
      tri.case_id = 4;
      tri.left = left_wall(c.gbl.hi);
      tri.right = right_wall(c.gbr.hi);
      break;
    case Regime::Tie_F_Gbl:
      tri.case_id = 5;
      tri.left = left_wall(c.gbl.hi);
      tri.right = initial(c.f.hi);
      break;
    case Regime::Tie_F_Gbr:
      tri.case_id = 6;
      tri.left = initial(c.f.lo);
      tri.right = right_wall(c.gbr.hi);
      break;
  }
  return tri;
}

bool triangle_contains(const Triangle& tri, double x, double t, double tol) {
  if (!tri.applicable) return false;
  if (t < 0.0 || t > tri.t0 + tol || x < 0.0 || x > 1.0) return false;
  auto [lo, hi] = tri.extent(std::min(t, tri.t0));
  return x >= lo - tol && x <= hi + tol;
}

// ---------------------------------------------------------------------------
// shock loci

namespace {

// Shrinks [a,b] onto the half carrying the larger part of the u jump; the
// point is kept only if a jump above thr survives at width 1e-12.
std::optional<double> bisect_jump(const Scenario& s, double t, double a, double b, double ua,
                                  double ub, double thr) {
  while (b - a > 1e-12) {
    double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) break;
    double um = u_at(s, mid, t);
    if (std::abs(um - ua) >= std::abs(ub - um)) {
      b = mid;
      ub = um;
    } else {
      a = mid;
      ua = um;
    }
  }
  if (std::abs(ub - ua) > thr) return 0.5 * (a + b);
  return std::nullopt;
}

// The u bisection stops somewhere inside the narrow tie band. Fix the
// minimizing branch on each side (family and parameter) and move onto the
// zero of their potential difference, so the point classifies as the tie.
struct Branch {
  PotentialKind kind;
  double param;
};

Branch left_branch(const RegimeClassification& c) {
  if (c.in_Gbl) return {PotentialKind::LeftBoundary, c.gbl.hi};
  if (c.in_F) return {PotentialKind::Initial, c.f.lo};
  return {PotentialKind::RightBoundary, c.gbr.lo};
}

Branch right_branch(const RegimeClassification& c) {
  if (c.in_Gbr) return {PotentialKind::RightBoundary, c.gbr.hi};
  if (c.in_F) return {PotentialKind::Initial, c.f.hi};
  return {PotentialKind::LeftBoundary, c.gbl.lo};
}

double centre_on_tie(const Scenario& s, double t, double x) {
  const double d = 1e-7;
  double a = std::max(0.0, x - d), b = std::min(1.0, x + d);
  Branch L = left_branch(classify(s, a, t)), R = right_branch(classify(s, b, t));
  if (L.kind == R.kind && L.param == R.param) return x;
  auto diff = [&](double y) {
    return potential_of(s, L.kind, L.param, y, t) - potential_of(s, R.kind, R.param, y, t);
  };
  if (!(diff(a) < 0.0) || !(diff(b) > 0.0)) return x;
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) break;
    if (diff(mid) < 0.0) a = mid;
    else b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::optional<double> locate_jump(const Scenario& s, double t, double a, double b) {
  if (!(t > 0.0)) throw std::invalid_argument("locate_jump: t must be > 0");
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  if (!(a < b)) return std::nullopt;
  double thr = tolerances().jump_rel * s.speed_range();
  if (!(thr > 0.0)) return std::nullopt;
  double ua = u_at(s, a, t, Side::Right), ub = u_at(s, b, t, Side::Left);
  if (!(std::abs(ub - ua) > thr)) return std::nullopt;
  auto x = bisect_jump(s, t, a, b, ua, ub, thr);
  if (x) return centre_on_tie(s, t, *x);
  return x;
}

std::vector<double> jump_points(const Scenario& s, double t, int nx) {
  if (nx < 2) throw std::invalid_argument("jump_points: nx must be >= 2");
  if (!(t > 0.0)) throw std::invalid_argument("jump_points: t must be > 0");
  double thr = tolerances().jump_rel * s.speed_range();
  std::vector<double> out;
  if (!(thr > 0.0)) return out;
  auto u = [&](double x) {
    if (x == 0.0) return u_at(s, 0.0, t, Side::Right);
    if (x == 1.0) return u_at(s, 1.0, t, Side::Left);
    return u_at(s, x, t);
  };
  std::vector<double> xs(nx + 1), us(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    xs[i] = i == nx ? 1.0 : double(i) / nx;
    us[i] = u(xs[i]);
  }
  for (int i = 0; i < nx; ++i) {
    if (!(std::abs(us[i + 1] - us[i]) > thr)) continue;
    if (auto x = bisect_jump(s, t, xs[i], xs[i + 1], us[i], us[i + 1], thr))
      out.push_back(centre_on_tie(s, t, *x));
  }
  // a jump sitting on a grid node is found from both neighbouring cells
  std::vector<double> merged;
  for (double x : out) {
    if (!merged.empty() && x - merged.back() < 1e-7) merged.back() = 0.5 * (merged.back() + x);
    else merged.push_back(x);
  }
  return merged;
}

std::vector<CharCurve> shock_locus(const Scenario& s, double t_lo, double t_hi, int nt, int nx,
                                   LocusOptions opt) {
  if (nt < 1 || nx < 2) throw std::invalid_argument("shock_locus: nt >= 1 and nx >= 2 required");
  if (!(t_lo > 0.0 && t_lo <= t_hi && t_hi <= s.t_max()))
    throw std::invalid_argument("shock_locus: need 0 < t_lo <= t_hi <= t_max");
  std::vector<double> times(nt + 1);
  for (int k = 0; k <= nt; ++k) times[k] = k == nt ? t_hi : t_lo + (t_hi - t_lo) * k / nt;
  std::vector<std::vector<double>> slices(nt + 1);
  parallel_for(times.size(), [&](std::size_t k) { slices[k] = jump_points(s, times[k], nx); });

  std::vector<CharCurve> curves;
  std::vector<std::size_t> active;  // curves that received a point in the previous slice
  const double speed = s.speed_scale();
  for (int k = 0; k <= nt; ++k) {
    const auto& pts = slices[k];
    double dt = k > 0 ? times[k] - times[k - 1] : 0.0;
    double reach = speed * dt + opt.link_slack / nx;
    struct Cand {
      double d;
      std::size_t curve, point;
    };
    std::vector<Cand> cands;
    for (std::size_t a = 0; a < active.size(); ++a) {
      double last = curves[active[a]].samples.back().second;
      for (std::size_t p = 0; p < pts.size(); ++p) {
        double d = std::abs(pts[p] - last);
        if (d <= reach) cands.push_back({d, active[a], p});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) {
      return p.d != q.d ? p.d < q.d : (p.curve != q.curve ? p.curve < q.curve : p.point < q.point);
    });
    std::vector<char> used_curve(curves.size(), 0), used_point(pts.size(), 0);
    std::vector<std::size_t> next;
    for (const auto& c : cands) {
      if (used_curve[c.curve] || used_point[c.point]) continue;
      used_curve[c.curve] = used_point[c.point] = 1;
      curves[c.curve].samples.emplace_back(times[k], pts[c.point]);
      next.push_back(c.curve);
    }
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (used_point[p]) continue;
      CharCurve cc;
      cc.samples.emplace_back(times[k], pts[p]);
      curves.push_back(std::move(cc));
      next.push_back(curves.size() - 1);
    }
    std::sort(next.begin(), next.end());
    active = std::move(next);
  }
  return curves;
}

}  // namespace strip_psg
