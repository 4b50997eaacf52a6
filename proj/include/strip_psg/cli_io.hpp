#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strip_psg/particle_oracle.hpp"

namespace strip_psg {

struct ToleranceOverrides {
  double weak = 5e-3;
  double mu = 1e-6;
  double boundary = 0.02;
  double oracle = 0.02;
};

struct RunConfig {
  std::string command;         // fields | curves | verify | oracle | examples
  std::string scenario = "s1";  // builtin name or JSON file path
  std::optional<double> a, b, btilde;  // family overrides for s1/s2
  std::vector<double> times;
  std::optional<std::pair<double, double>> t_range;
  int t_count = 5;  // samples in t_range (or the default range)
  int nx = 400, nt = 200;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  ToleranceOverrides tol;
  std::string checks = "all";  // all|entropy|weak|identities|monotonicity|boundary|oracle
  int particles = 2000;
  std::vector<std::pair<double, double>> traces;  // (x, t) starts for run_curves
  WallRule wall = WallRule::Inert;  // oracle wall treatment
};

// Builtin name (with family overrides) or a scenario file.
ScenarioData load_scenario(const RunConfig& cfg);

// Explicit times, else t_count evenly spaced times in the range (default (0,T]).
// Throws std::invalid_argument for times outside (0, t_max].
std::vector<double> resolve_times(const RunConfig& cfg, double t_max);

// 17 significant digits, '.' separator, independent of the locale.
std::string format_number(double v);

// Presets shared by verify and the acceptance run.
// Interior points for the H identities, clear of jumps, walls and capture onsets.
std::vector<std::pair<double, double>> h_identity_points(const Scenario& s, double h);
std::vector<TestFunction> verify_bumps(double t_max);

struct RunResult {
  std::vector<std::string> files;
  bool ok = true;
  std::string summary;
};

// fields.csv (x,t,u,m,regime,mu) and atoms.csv (t,location,mass,kind).
RunResult run_fields(const RunConfig& cfg);
// curves.csv (curve_id,t,x): shock loci over the time range, then traces.
RunResult run_curves(const RunConfig& cfg);
// verify.json; ok is false iff a selected check (or scenario validation) fails.
RunResult run_verify(const RunConfig& cfg);
// oracle.csv (t,x,empirical_m,solver_m) and oracle.json with per-time reports.
RunResult run_oracle(const RunConfig& cfg);
// Per builtin scenario: fields, atoms and curves under <out>/<name>/, plus
// examples.csv comparing computed quantities with their closed forms.
RunResult run_examples(const RunConfig& cfg);

RunResult run(const RunConfig& cfg);

}  // namespace strip_psg
