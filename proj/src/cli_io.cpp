#include "strip_psg/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "strip_psg/parallel.hpp"

namespace strip_psg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_builtin(const std::string& name) {
  return name == "s1" || name == "s2" || name == "s3" || name == "s4";
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

void write_file(const fs::path& path, const std::string& text, RunResult& res) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  f.close();
  if (!f) throw std::runtime_error("write failed for " + path.string());
  res.files.push_back(path.string());
}

std::string join(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string fmt(double v) { return format_number(v); }

Scenario checked_scenario(const RunConfig& cfg) {
  ScenarioData d = load_scenario(cfg);
  auto v = validate(d);
  if (!v.ok) {
    std::string msg = "scenario " + d.name + " fails validation:";
    for (const auto& x : v.violations) msg += " " + x.field + "[" + std::to_string(x.piece) + "]: " + x.message + ";";
    throw std::invalid_argument(msg);
  }
  return Scenario(std::move(d));
}

std::string fields_csv(const Scenario& s, const std::vector<double>& times, int nx) {
  std::vector<std::string> rows(times.size() * (nx + 1));
  parallel_for(rows.size(), [&](std::size_t k) {
    double t = times[k / (nx + 1)];
    double x = static_cast<double>(k % (nx + 1)) / nx;
    auto f = sample_field(s, x, t);
    rows[k] = join({fmt(x), fmt(t), fmt(f.u), fmt(f.m), to_string(f.regime.winner), fmt(f.regime.mu)});
  });
  std::string out = "x,t,u,m,regime,mu\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

std::string atoms_csv(const Scenario& s, const std::vector<double>& times, int nx) {
  std::string out = "t,location,mass,kind\n";
  for (double t : times) {
    auto m = measure_at(s, t, std::max(nx, 16));
    if (m.left_atom > m.threshold) out += join({fmt(t), fmt(0.0), fmt(m.left_atom), "left"}) + "\n";
    for (const auto& a : m.interior_atoms) out += join({fmt(t), fmt(a.x), fmt(a.mass), "interior"}) + "\n";
    if (m.right_atom > m.threshold) out += join({fmt(t), fmt(1.0), fmt(m.right_atom), "right"}) + "\n";
  }
  return out;
}

std::string curves_csv(const Scenario& s, double t_lo, double t_hi, int nt, int nx,
                       const std::vector<std::pair<double, double>>& traces) {
  std::string out = "curve_id,t,x\n";
  int id = 0;
  for (const auto& c : shock_locus(s, t_lo, t_hi, nt, nx)) {
    for (const auto& [t, x] : c.samples) out += join({std::to_string(id), fmt(t), fmt(x)}) + "\n";
    ++id;
  }
  for (const auto& [x1, t1] : traces) {
    double T = s.t_max();
    if (!(t1 > 0.0 && t1 < T && x1 >= 0.0 && x1 <= 1.0))
      throw std::invalid_argument("trace start must lie in [0,1] x (0,t_max)");
    auto c = trace_curve(s, x1, t1, T, (T - t1) / std::max(nt, 1));
    for (const auto& [t, x] : c.samples) out += join({std::to_string(id), fmt(t), fmt(x)}) + "\n";
    ++id;
  }
  return out;
}

CheckReport combine(const std::string& name, const std::vector<CheckReport>& parts) {
  CheckReport r;
  r.name = name;
  for (const auto& p : parts) {
    r.tolerance = std::max(r.tolerance, p.tolerance);
    r.samples += p.samples;
    r.skipped += p.skipped;
    if (p.worst > r.worst || (!p.pass && r.pass)) {
      r.worst = p.worst;
      r.worst_x = p.worst_x;
      r.worst_t = p.worst_t;
    }
    r.pass = r.pass && p.pass;
    if (!p.pass && !p.note.empty()) r.note += (r.note.empty() ? "" : "; ") + p.note;
  }
  return r;
}

bool selected(const std::string& checks, const std::string& name) {
  return checks == "all" || checks == name;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Interior sample points for the H identities, kept away from jumps of u
// (where the finite differences straddle an atom), from the walls, and from
// times at which a wall starts or stops capturing (H_t jumps there).
std::vector<std::pair<double, double>> h_identity_points(const Scenario& s, double h) {
  const double T = s.t_max();
  std::vector<std::pair<double, double>> pts;
  auto walls = [&](double t) {
    return std::pair{left_wall_atom_regime(classify(s, 0.0, t)), right_wall_atom_regime(classify(s, 1.0, t))};
  };
  for (double ft : {0.23, 0.47, 0.71}) {
    double t = ft * T;
    if (walls(t - h) != walls(t + h)) continue;
    std::vector<double> jumps;
    for (double tt : {t - h, t, t + h})
      for (double j : jump_points(s, tt, 400)) jumps.push_back(j);
    for (int k = 0; k < 8; ++k) {
      double x = 0.15 + 0.1 * k;
      bool clear = true;
      for (double j : jumps) clear = clear && std::abs(j - x) > 0.02;
      if (clear) pts.push_back({x, t});
    }
  }
  return pts;
}

std::vector<TestFunction> verify_bumps(double T) {
  return {{0.5, 0.5 * T, 0.3, 0.3 * T}, {0.3, 0.3 * T, 0.2, 0.2 * T}, {0.7, 0.7 * T, 0.2, 0.2 * T}};
}

ScenarioData load_scenario(const RunConfig& cfg) {
  bool overrides = cfg.a || cfg.b || cfg.btilde;
  if (cfg.scenario == "s1") return scenario_s1(cfg.a.value_or(-2.0), cfg.b.value_or(-1.0), cfg.btilde.value_or(3.0));
  if (cfg.scenario == "s2") return scenario_s2(cfg.a.value_or(2.0), cfg.btilde.value_or(1.0), cfg.b.value_or(-3.0));
  if (overrides) throw std::invalid_argument("--a/--b/--btilde apply to s1 and s2 only");
  if (is_builtin(cfg.scenario)) return builtin_scenario(cfg.scenario);
  return load_scenario_file(cfg.scenario);
}

std::vector<double> resolve_times(const RunConfig& cfg, double t_max) {
  std::vector<double> out = cfg.times;
  if (out.empty()) {
    if (cfg.t_count < 1) throw std::invalid_argument("time count must be >= 1");
    double lo = cfg.t_range ? cfg.t_range->first : 0.0;
    double hi = cfg.t_range ? cfg.t_range->second : t_max;
    if (!(hi > lo)) throw std::invalid_argument("empty time range");
    if (cfg.t_range && cfg.t_count > 1) {
      for (int k = 0; k < cfg.t_count; ++k) out.push_back(lo + (hi - lo) * k / (cfg.t_count - 1));
    } else {
      for (int k = 1; k <= cfg.t_count; ++k) out.push_back(lo + (hi - lo) * k / cfg.t_count);
    }
  }
  for (double t : out)
    if (!(t > 0.0 && t <= t_max)) throw std::invalid_argument("time " + format_number(t) + " outside (0, t_max]");
  return out;
}

RunResult run_fields(const RunConfig& cfg) {
  if (cfg.nx < 1) throw std::invalid_argument("nx must be >= 1");
  Scenario s = checked_scenario(cfg);
  auto times = resolve_times(cfg, s.t_max());
  RunResult res;
  fs::path dir = prepare_dir(cfg.out_dir);
  write_file(dir / "fields.csv", fields_csv(s, times, cfg.nx), res);
  write_file(dir / "atoms.csv", atoms_csv(s, times, cfg.nx), res);
  res.summary = "fields for " + s.name() + " at " + std::to_string(times.size()) + " times";
  return res;
}

RunResult run_curves(const RunConfig& cfg) {
  if (cfg.nx < 1 || cfg.nt < 1) throw std::invalid_argument("nx and nt must be >= 1");
  Scenario s = checked_scenario(cfg);
  double T = s.t_max();
  double lo = cfg.t_range ? cfg.t_range->first : T / cfg.nt;
  double hi = cfg.t_range ? cfg.t_range->second : T;
  if (!(lo > 0.0 && hi <= T && hi > lo)) throw std::invalid_argument("bad time range for curves");
  RunResult res;
  fs::path dir = prepare_dir(cfg.out_dir);
  write_file(dir / "curves.csv", curves_csv(s, lo, hi, cfg.nt, cfg.nx, cfg.traces), res);
  res.summary = "curves for " + s.name();
  return res;
}

RunResult run_verify(const RunConfig& cfg) {
  static const char* known[] = {"all", "entropy", "weak", "identities", "monotonicity", "boundary", "oracle"};
  if (std::find(std::begin(known), std::end(known), cfg.checks) == std::end(known))
    throw std::invalid_argument("unknown check selection: " + cfg.checks);
  RunResult res;
  fs::path dir = prepare_dir(cfg.out_dir);
  ScenarioData d = load_scenario(cfg);
  std::vector<CheckReport> reports;

  auto v = validate(d);
  CheckReport val;
  val.name = "validation";
  val.samples = 1;
  val.pass = v.ok;
  for (const auto& x : v.violations) val.note += x.field + "[" + std::to_string(x.piece) + "]: " + x.message + "; ";
  reports.push_back(val);

  if (v.ok) {
    Scenario s(d);
    const double T = s.t_max();
    int nx = std::max(cfg.nx, 16), nt = std::max(cfg.nt, 16);
    if (selected(cfg.checks, "entropy")) {
      std::vector<CheckReport> parts;
      for (int k = 0; k < 50; ++k) parts.push_back(check_entropy(s, T * (k + 0.5) / 50, nx));
      reports.push_back(combine("entropy", parts));
    }
    if (selected(cfg.checks, "boundary")) {
      std::vector<double> ts;
      for (int k = 1; k <= 20; ++k) ts.push_back(T * (k + 0.37) / 21);
      reports.push_back(check_boundary_traces(s, ts, cfg.tol.boundary));
    }
    if (selected(cfg.checks, "weak")) reports.push_back(check_weak(s, verify_bumps(T), nx, nt, cfg.tol.weak));
    if (selected(cfg.checks, "identities")) {
      reports.push_back(check_mu_identities(s, {{0.2, 0.8, 0.1 * T, 0.5 * T}, {0.05, 0.95, 0.3 * T, 0.9 * T}},
                                            cfg.tol.mu));
      std::vector<CheckReport> parts;
      for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) parts.push_back(check_rn_derivatives(s, f * T, nx));
      reports.push_back(combine("rn_derivatives", parts));
      const double h = 1e-4;
      auto pts = h_identity_points(s, h);
      if (!pts.empty()) reports.push_back(check_H_identities(s, pts, h));
    }
    if (selected(cfg.checks, "monotonicity")) {
      reports.push_back(check_minimizer_lemmas(s, 1000, cfg.seed));
      reports.push_back(check_triangles(s, 1000, cfg.seed));
    }
    if (selected(cfg.checks, "oracle")) {
      auto ps = init_particles(s, cfg.particles, cfg.seed, {0.0, false, cfg.wall});
      std::vector<CheckReport> parts;
      for (int k = 1; k <= 5; ++k) {
        double t = T * k / 5.0;
        ps.advance(t);
        parts.push_back(compare(s, ps, t, 8192, cfg.tol.oracle));
      }
      reports.push_back(combine("oracle", parts));
    }
  }

  json doc;
  doc["scenario"] = d.name;
  doc["checks"] = json::parse(to_json(reports));
  res.ok = true;
  for (const auto& r : reports) res.ok = res.ok && r.pass;
  doc["pass"] = res.ok;
  write_file(dir / "verify.json", doc.dump(2) + "\n", res);
  std::ostringstream sum;
  for (const auto& r : reports)
    sum << (r.pass ? "PASS " : "FAIL ") << r.name << " worst=" << format_number(r.worst)
        << " tol=" << format_number(r.tolerance) << "\n";
  res.summary = sum.str();
  return res;
}

RunResult run_oracle(const RunConfig& cfg) {
  if (cfg.nx < 1) throw std::invalid_argument("nx must be >= 1");
  Scenario s = checked_scenario(cfg);
  auto times = resolve_times(cfg, s.t_max());
  std::sort(times.begin(), times.end());
  RunResult res;
  fs::path dir = prepare_dir(cfg.out_dir);
  auto ps = init_particles(s, cfg.particles, cfg.seed, {0.0, false, cfg.wall});
  std::string csv = "t,x,empirical_m,solver_m\n";
  std::vector<CheckReport> reports;
  for (double t : times) {
    ps.advance(t);
    reports.push_back(compare(s, ps, t, 8192, cfg.tol.oracle));
    double base = m_at(s, 0.0, t);
    std::vector<std::string> rows(cfg.nx + 1);
    parallel_for(rows.size(), [&](std::size_t i) {
      double x = static_cast<double>(i) / cfg.nx;
      rows[i] = join({fmt(t), fmt(x), fmt(base + empirical_m(ps, x)), fmt(m_at(s, x, t, Side::Right))});
    });
    for (const auto& r : rows) csv += r + "\n";
  }
  write_file(dir / "oracle.csv", csv, res);
  json doc;
  doc["scenario"] = s.name();
  doc["particles"] = cfg.particles;
  doc["times"] = times;
  doc["reports"] = json::parse(to_json(reports));
  for (const auto& r : reports) res.ok = res.ok && r.pass;
  doc["pass"] = res.ok;
  write_file(dir / "oracle.json", doc.dump(2) + "\n", res);
  std::ostringstream sum;
  for (std::size_t k = 0; k < times.size(); ++k)
    sum << "t=" << format_number(times[k]) << " " << (reports[k].pass ? "PASS " : "FAIL ") << reports[k].note << "\n";
  res.summary = sum.str();
  return res;
}

RunResult run_examples(const RunConfig& cfg) {
  RunResult res;
  fs::path dir = prepare_dir(cfg.out_dir);
  std::string table = "scenario,quantity,t,computed,expected,abs_error\n";
  auto row = [&](const std::string& sc, const std::string& q, double t, double got, double want) {
    double err = std::abs(got - want);
    res.ok = res.ok && err <= 1e-3 * std::max(1.0, std::abs(want));
    table += join({sc, q, fmt(t), fmt(got), fmt(want), fmt(err)}) + "\n";
  };
  auto atom_near = [](const Scenario& s, double t, double x) {
    double best = 0.0, dist = 1.0;
    for (const auto& a : measure_at(s, t, 400).interior_atoms)
      if (std::abs(a.x - x) < dist) {
        dist = std::abs(a.x - x);
        best = a.mass;
      }
    return best;
  };
  auto jump_near = [](const Scenario& s, double t, double x) {
    return locate_jump(s, t, x - 0.02, x + 0.02).value_or(std::nan(""));
  };
  const std::vector<std::pair<std::string, std::vector<double>>> plan = {
      {"s1", {0.2, 0.5, 1.0, 2.0}}, {"s2", {0.2, 0.5, 1.0, 2.0}},
      {"s3", {0.3, 0.6, 0.69, 0.71, 0.9}}, {"s4", {0.2, 0.3, 0.6, 1.0}}};
  for (const auto& [name, times] : plan) {
    RunConfig sub = cfg;
    sub.scenario = name;
    sub.a.reset();
    sub.b.reset();
    sub.btilde.reset();
    sub.times = times;
    sub.t_range.reset();
    sub.out_dir = (dir / name).string();
    for (auto* f : {&run_fields, &run_curves}) {
      auto r = (*f)(sub);
      res.files.insert(res.files.end(), r.files.begin(), r.files.end());
    }
    Scenario s(builtin_scenario(name));
    if (name == "s1") {
      row(name, "first shock position", 0.2, jump_near(s, 0.2, 0.1), 0.1);
      row(name, "second shock position", 0.5, jump_near(s, 0.5, 2.5 - std::sqrt(5.0)), 2.5 - std::sqrt(5.0));
      row(name, "third shock position", 1.0, jump_near(s, 1.0, 0.75), 0.75);
      row(name, "right wall mass", 2.0, measure_at(s, 2.0, 400).right_atom, 8.0);
    } else if (name == "s2") {
      row(name, "first shock position", 0.2, jump_near(s, 0.2, 0.9), 0.9);
      row(name, "left wall mass", 2.0, measure_at(s, 2.0, 400).left_atom, 8.0);
    } else if (name == "s3") {
      row(name, "centre atom mass", 0.3, atom_near(s, 0.3, 0.5), 1.2);
      row(name, "interior atom count", 0.69, static_cast<double>(measure_at(s, 0.69, 400).interior_atoms.size()), 3);
      row(name, "interior atom count", 0.71, static_cast<double>(measure_at(s, 0.71, 400).interior_atoms.size()), 1);
      row(name, "merged atom mass", 0.9, atom_near(s, 0.9, 0.5), 6 * 0.9 - 1);
    } else {
      row(name, "centre atom mass", 0.2, atom_near(s, 0.2, 0.5), 0.8);
      row(name, "centre atom mass", 0.3, atom_near(s, 0.3, 0.5), 1.0);
      row(name, "centre atom mass", 1.0, atom_near(s, 1.0, 0.5), 2.0);
    }
  }
  write_file(dir / "examples.csv", table, res);
  res.summary = table;
  return res;
}

RunResult run(const RunConfig& cfg) {
  if (cfg.command == "fields") return run_fields(cfg);
  if (cfg.command == "curves") return run_curves(cfg);
  if (cfg.command == "verify") return run_verify(cfg);
  if (cfg.command == "oracle") return run_oracle(cfg);
  if (cfg.command == "examples") return run_examples(cfg);
  throw std::invalid_argument("unknown command: " + cfg.command);
}

}  // namespace strip_psg
