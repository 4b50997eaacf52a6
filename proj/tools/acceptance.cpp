// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "strip_psg/characteristics.hpp"
#include "strip_psg/cli_io.hpp"

using namespace strip_psg;

namespace {

// criterion 1
constexpr int kLocusGrid = 2000;
constexpr double kLocusSeconds = 60.0;
// criterion 2
constexpr double kWallAtomRel = 1e-3;
constexpr double kMassBalance = 1e-8;
// criterion 3
constexpr double kMergeCoord = 0.01;
constexpr double kMergedMassRel = 0.01;
constexpr double kPreMergeRel = 1e-3;
constexpr double kCentreVelocity = 1e-6;
// criterion 4
constexpr double kAbsorbedMass = 1e-3;
constexpr double kVacuum = 1e-9;
// criterion 5: margins live in check_entropy
constexpr int kEntropySlices = 50;
constexpr int kEntropyGrid = 1000;
// criterion 6
constexpr int kWeakGrid = 2000;
constexpr double kWeakRel = 5e-3;
constexpr double kWeakDecay = 1.5;
constexpr double kWeakFloor = 1e-9;  // residuals below this are quadrature round-off
constexpr double kMu = 1e-6;
constexpr double kH = 1e-3;
// criterion 7
constexpr double kTraceEps = 1e-3;
constexpr double kTraceTol = 0.02;
// criterion 8
constexpr int kParticles = 2000;
constexpr double kOracleSup = 0.02;
constexpr double kOracleRatio = 1.5;
constexpr double kOracleSeconds = 120.0;
// criterion 9
constexpr int kPropertySamples = 1000;
constexpr int kRandomScenarios = 20;

bool all_ok = true;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  all_ok = all_ok && pass;
}

std::string num(double v) { return format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ScenarioData> builtins() { return {scenario_s1(), scenario_s2(), scenario_s3(), scenario_s4()}; }

double s1_shock(double t) {
  if (t <= 0.4) return t / 2;
  if (t <= 0.625) return 3 * t + 1 - std::sqrt(10 * t);
  return t - 0.25;
}

void shock_curves() {
  // timed on one worker
  const char* prev = std::getenv("STRIP_PSG_THREADS");
  std::string saved = prev ? prev : "";
  setenv("STRIP_PSG_THREADS", "1", 1);
  Scenario s(scenario_s1());
  auto t0 = std::chrono::steady_clock::now();
  auto loci = shock_locus(s, 1e-3, 1.25, kLocusGrid, kLocusGrid);
  double secs = seconds_since(t0);
  if (prev) setenv("STRIP_PSG_THREADS", saved.c_str(), 1);
  else unsetenv("STRIP_PSG_THREADS");

  double err = 0.0;
  long n = 0;
  for (const auto& c : loci)
    for (const auto& [t, x] : c.samples) {
      err = std::max(err, std::abs(x - s1_shock(t)));
      ++n;
    }
  double tol = 2.0 / kLocusGrid;
  bool pass = n >= kLocusGrid / 2 && err <= tol && secs <= kLocusSeconds;
  report(1, pass, "s1 loci sup_err=" + num(err) + " tol=" + num(tol) + " samples=" + std::to_string(n) +
                      " seconds=" + num(secs));
}

void right_wall_concentration() {
  Scenario s(scenario_s1());
  double atom = 0.0, balance = 0.0;
  for (double t : {1.25, 1.4, 1.75, 2.0, 2.25, 2.5}) {
    auto mu = measure_at(s, t, 2000);
    atom = std::max(atom, std::abs(mu.right_atom - 4 * t) / (4 * t));
    balance = std::max(balance, std::abs(mu.total_mass() - (1 + 4 * t)));
  }
  report(2, atom <= kWallAtomRel && balance <= kMassBalance,
         "right_atom rel_err=" + num(atom) + " mass_balance_err=" + num(balance));
}

std::vector<Atom> s3_atoms(const Scenario& s, double t) {
  std::vector<Atom> out;
  for (const auto& a : measure_at(s, t, 400).interior_atoms)
    if (a.mass > 1e-6) out.push_back(a);
  return out;
}

void interior_merge() {
  Scenario s(scenario_s3());
  bool pass = true;
  double pre = 0.0;
  for (double t : {0.55, 0.6, 0.65, 0.68}) {
    auto a = s3_atoms(s, t);
    if (a.size() != 3) {
      pass = false;
      continue;
    }
    pre = std::max({pre, std::abs(a[0].mass - (t - 0.5)) / (t - 0.5), std::abs(a[1].mass - 4 * t) / (4 * t),
                    std::abs(a[2].mass - (t - 0.5)) / (t - 0.5)});
  }
  double lo = 0.6, hi = 0.8;
  pass = pass && s3_atoms(s, lo).size() == 3 && s3_atoms(s, hi).size() == 1;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (s3_atoms(s, mid).size() == 3 ? lo : hi) = mid;
  }
  auto merged = s3_atoms(s, hi + 1e-6);
  double mx = merged.size() == 1 ? merged[0].x : std::nan("");
  double merged_err = 0.0;
  for (double t : {0.75, 0.9, 1.2, 1.5}) {
    auto a = s3_atoms(s, t);
    merged_err = a.size() == 1 ? std::max(merged_err, std::abs(a[0].mass - (6 * t - 1)) / (6 * t - 1)) : 1.0;
  }
  double centre_u = 0.0;
  for (double t : {0.1, 0.3, 0.5, 0.6, 0.9, 1.4}) centre_u = std::max(centre_u, std::abs(u_at(s, 0.5, t)));
  pass = pass && pre <= kPreMergeRel && std::abs(hi - 0.7) <= kMergeCoord && std::abs(mx - 0.5) <= kMergeCoord &&
         merged_err <= kMergedMassRel && centre_u <= kCentreVelocity;
  report(3, pass, "premerge_rel=" + num(pre) + " merge=(" + num(mx) + "," + num(hi) + ") merged_rel=" +
                      num(merged_err) + " centre_u=" + num(centre_u));
}

void absorption() {
  Scenario s(scenario_s4());
  double mass_err = 0.0;
  for (double t : {0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.9, 1.2, 1.5}) {
    double want = t <= 0.25 ? 4 * t : (t <= 0.5 ? 1.0 : 2 * t);
    double got = m_at(s, 0.5, t, Side::Right) - m_at(s, 0.5, t, Side::Left);
    mass_err = std::max(mass_err, std::abs(got - want));
  }
  double vac = 0.0;
  for (double t : {0.05, 0.1, 0.15, 0.2, 0.24}) {
    const int cells = 50;
    double a = t, b = 2 * t, pad = 1e-6;
    for (int k = 0; k < cells; ++k) {
      double x0 = a + pad + (b - a - 2 * pad) * k / cells, x1 = a + pad + (b - a - 2 * pad) * (k + 1) / cells;
      vac = std::max(vac, (m_at(s, x1, t) - m_at(s, x0, t)) / (x1 - x0));
      vac = std::max(vac, (m_at(s, 1 - x0, t) - m_at(s, 1 - x1, t)) / (x1 - x0));
    }
  }
  report(4, mass_err <= kAbsorbedMass && vac <= kVacuum, "atom_err=" + num(mass_err) + " fan_density=" + num(vac));
}

void entropy() {
  double worst = 0.0;
  long jumps = 0;
  bool pass = true;
  for (const auto& d : builtins()) {
    Scenario s(d);
    for (int k = 0; k < kEntropySlices; ++k) {
      auto r = check_entropy(s, s.t_max() * (k + 0.5) / kEntropySlices, kEntropyGrid);
      pass = pass && r.pass;
      worst = std::max(worst, r.worst);
      jumps += r.samples;
    }
  }
  report(5, pass, "s1-s4 slices=" + std::to_string(kEntropySlices) + " observations=" + std::to_string(jumps) +
                      " worst=" + num(worst));
}

double bump_residual(const WeakResidual& w) { return std::max(w.rel1(), w.rel2()); }

void identities() {
  bool pass = true;
  double weak = 0.0, decay = 1e300, mu = 0.0, h = 0.0;
  std::string rn_note;
  for (const auto& d : builtins()) {
    Scenario s(d);
    const double T = s.t_max();
    auto bumps = verify_bumps(T);
    auto coarse = weak_residuals(s, bumps, kWeakGrid / 2, kWeakGrid / 2);
    auto fine = weak_residuals(s, bumps, kWeakGrid, kWeakGrid);
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      double c = bump_residual(coarse[i]), f = bump_residual(fine[i]);
      weak = std::max(weak, f);
      if (c > kWeakFloor) decay = std::min(decay, c / std::max(f, 1e-300));
    }
    auto m = check_mu_identities(s, {{0.2, 0.8, 0.1 * T, 0.5 * T}, {0.05, 0.95, 0.3 * T, 0.9 * T}}, kMu);
    pass = pass && m.pass;
    mu = std::max(mu, m.worst);
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      auto r = check_rn_derivatives(s, f * T, 1000);
      if (!r.pass) rn_note += " " + d.name + "@" + num(f * T);
      pass = pass && r.pass;
    }
    const double step = 1e-4;
    auto pts = h_identity_points(s, step);
    if (!pts.empty()) {
      auto r = check_H_identities(s, pts, step);
      h = std::max(h, r.worst);
      pass = pass && r.worst <= kH;
    }
  }
  pass = pass && weak <= kWeakRel && decay >= kWeakDecay;
  report(6, pass, "weak_rel=" + num(weak) + " decay=" + num(decay) + " mu=" + num(mu) + " H=" + num(h) +
                      " rn_fail=[" + rn_note + " ]");
}

void left_traces() {
  Scenario s(scenario_s1());
  const double T = s.t_max();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    double t = T * (k + 0.37) / 20.5;
    double u = u_at(s, kTraceEps, t);
    double dx = 0.1 * kTraceEps;
    double rho = (m_at(s, kTraceEps + dx, t) - m_at(s, kTraceEps - dx, t)) / (2 * dx);
    worst = std::max({worst, std::abs(u - 3.0), std::abs(rho * u - 3.0)});
  }
  report(7, worst <= kTraceTol, "s1 left wall times=20 worst=" + num(worst));
}

void oracle() {
  auto t0 = std::chrono::steady_clock::now();
  double sup = 0.0, ratio = 1e300, levy = 0.0;
  for (const auto& d : builtins()) {
    Scenario s(d);
    double worst[2] = {0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
      auto ps = init_particles(s, kParticles << j);
      for (int k = 1; k <= 5; ++k) {
        double t = s.t_max() * k / 5;
        ps.advance(t);
        auto o = oracle_distance(s, ps, t);
        worst[j] = std::max(worst[j], o.sup);
        if (j == 0) levy = std::max(levy, o.levy);
      }
    }
    sup = std::max(sup, worst[0]);
    ratio = std::min(ratio, worst[0] / std::max(worst[1], 1e-300));
  }
  double secs = seconds_since(t0);
  report(8, sup <= kOracleSup && ratio >= kOracleRatio && secs <= kOracleSeconds,
         "sup/M=" + num(sup) + " ratio=" + num(ratio) + " seconds=" + num(secs) + " (levy=" + num(levy) + ")");
}

void properties() {
  std::vector<ScenarioData> all = builtins();
  for (int k = 1; k <= kRandomScenarios; ++k) all.push_back(random_scenario(k));
  bool pass = true;
  std::string failed;
  for (const auto& d : all) {
    Scenario s(d);
    auto a = check_minimizer_lemmas(s, kPropertySamples, 1);
    auto b = check_triangles(s, kPropertySamples, 1);
    if (!a.pass || !b.pass) failed += " " + d.name;
    pass = pass && a.pass && b.pass;
  }
  report(9, pass, "scenarios=" + std::to_string(all.size()) + " samples=" + std::to_string(kPropertySamples) +
                      " failed=[" + failed + " ]");
}

}  // namespace

int main() {
  shock_curves();
  right_wall_concentration();
  interior_merge();
  absorption();
  entropy();
  identities();
  left_traces();
  oracle();
  properties();
  return all_ok ? 0 : 1;
}
