#include "strip_psg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace strip_psg {

using json = nlohmann::json;

Scenario::Scenario(ScenarioData data) : d_(std::move(data)) {
  if (!(d_.t_max > 0.0) || !std::isfinite(d_.t_max))
    throw std::invalid_argument("Scenario: t_max must be finite and positive");
  auto check = [](const PiecewiseConstant& f, double lo, double hi, const char* what) {
    if (f.domain_lo() != lo || f.domain_hi() != hi)
      throw std::invalid_argument(std::string("Scenario: ") + what + " has the wrong domain");
  };
  check(d_.rho0, 0.0, 1.0, "rho0");
  check(d_.u0, 0.0, 1.0, "u0");
  check(d_.rho_bl, 0.0, d_.t_max, "rho_bl");
  check(d_.u_bl, 0.0, d_.t_max, "u_bl");
  check(d_.rho_br, 0.0, d_.t_max, "rho_br");
  check(d_.u_br, 0.0, d_.t_max, "u_br");
  init_ = DataPair(d_.rho0, d_.u0);
  left_ = DataPair(d_.rho_bl, d_.u_bl);
  right_ = DataPair(d_.rho_br, d_.u_br);
  m0_ = init_.cumulative(0, 0, 1.0);
  q0_ = init_.cumulative(1, 0, 1.0);
}

double Scenario::max_density() const {
  return std::max({d_.rho0.max_value(), d_.rho_bl.max_value(), d_.rho_br.max_value()});
}

double Scenario::speed_scale() const {
  double s = 0.0;
  for (const auto* f : {&d_.u0, &d_.u_bl, &d_.u_br})
    s = std::max({s, std::abs(f->min_value()), std::abs(f->max_value())});
  return s;
}

double Scenario::speed_range() const {
  double lo = std::min({d_.u0.min_value(), d_.u_bl.min_value(), d_.u_br.min_value()});
  double hi = std::max({d_.u0.max_value(), d_.u_bl.max_value(), d_.u_br.max_value()});
  return hi - lo;
}

std::vector<double> Scenario::boundary_breakpoints() const {
  std::vector<double> b;
  for (const auto* f : {&d_.rho_bl, &d_.u_bl, &d_.rho_br, &d_.u_br})
    b.insert(b.end(), f->breakpoints().begin(), f->breakpoints().end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

void Scenario::require_time(double t) const {
  if (!(t >= 0.0 && t <= d_.t_max))
    throw std::domain_error("time " + std::to_string(t) + " outside [0, t_max=" +
                            std::to_string(d_.t_max) + "]");
}

ValidationReport validate(const ScenarioData& s) {
  ValidationReport r;
  auto fail = [&](const std::string& field, std::size_t piece, const std::string& msg) {
    r.ok = false;
    r.violations.push_back({field, piece, msg});
  };
  if (!(s.t_max > 0.0) || !std::isfinite(s.t_max)) fail("t_max", 0, "t_max must be positive");
  auto positive = [&](const PiecewiseConstant& f, const char* name) {
    for (std::size_t i = 0; i < f.piece_count(); ++i)
      if (!(f.values()[i] > 0.0)) fail(name, i, "density must be > 0");
  };
  positive(s.rho0, "rho0");
  positive(s.rho_bl, "rho_bl");
  positive(s.rho_br, "rho_br");
  for (std::size_t i = 0; i < s.u_bl.piece_count(); ++i)
    if (!(s.u_bl.values()[i] > 0.0)) fail("u_bl", i, "left inflow speed must be > 0");
  for (std::size_t i = 0; i < s.u_br.piece_count(); ++i)
    if (!(s.u_br.values()[i] < 0.0)) fail("u_br", i, "right inflow speed must be < 0");
  auto domain = [&](const PiecewiseConstant& f, double hi, const char* name) {
    if (f.domain_lo() != 0.0 || f.domain_hi() != hi) fail(name, 0, "wrong domain");
  };
  domain(s.rho0, 1.0, "rho0");
  domain(s.u0, 1.0, "u0");
  domain(s.rho_bl, s.t_max, "rho_bl");
  domain(s.u_bl, s.t_max, "u_bl");
  domain(s.rho_br, s.t_max, "rho_br");
  domain(s.u_br, s.t_max, "u_br");
  return r;
}

ScenarioData scenario_s1(double a, double b, double btilde, double t_max) {
  ScenarioData s;
  s.name = "s1";
  s.t_max = t_max;
  s.rho0 = PiecewiseConstant::constant(0, 1, 1.0);
  s.u0 = PiecewiseConstant::constant(0, 1, a);
  s.rho_bl = PiecewiseConstant::constant(0, t_max, 1.0);
  s.u_bl = PiecewiseConstant::constant(0, t_max, btilde);
  s.rho_br = PiecewiseConstant::constant(0, t_max, 1.0);
  s.u_br = PiecewiseConstant::constant(0, t_max, b);
  return s;
}

ScenarioData scenario_s2(double a, double btilde, double b, double t_max) {
  ScenarioData s = scenario_s1(a, b, btilde, t_max);
  s.name = "s2";
  return s;
}

ScenarioData scenario_s3(double t_max) {
  ScenarioData s;
  s.name = "s3";
  s.t_max = t_max;
  s.rho0 = PiecewiseConstant::constant(0, 1, 1.0);
  s.u0 = PiecewiseConstant(0, 1, {0.5}, {2.0, -2.0});
  s.rho_bl = PiecewiseConstant::constant(0, t_max, 1.0);
  s.rho_br = PiecewiseConstant::constant(0, t_max, 1.0);
  if (t_max > 0.5) {
    s.u_bl = PiecewiseConstant(0, t_max, {0.5}, {2.0, 3.0});
    s.u_br = PiecewiseConstant(0, t_max, {0.5}, {-2.0, -3.0});
  } else {
    s.u_bl = PiecewiseConstant::constant(0, t_max, 2.0);
    s.u_br = PiecewiseConstant::constant(0, t_max, -2.0);
  }
  return s;
}

ScenarioData scenario_s4(double t_max) {
  ScenarioData s;
  s.name = "s4";
  s.t_max = t_max;
  s.rho0 = PiecewiseConstant::constant(0, 1, 1.0);
  s.u0 = PiecewiseConstant(0, 1, {0.5}, {2.0, -2.0});
  s.rho_bl = PiecewiseConstant::constant(0, t_max, 1.0);
  s.u_bl = PiecewiseConstant::constant(0, t_max, 1.0);
  s.rho_br = PiecewiseConstant::constant(0, t_max, 1.0);
  s.u_br = PiecewiseConstant::constant(0, t_max, -1.0);
  return s;
}

ScenarioData random_scenario(std::uint64_t seed, double t_max) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto fn = [&](double hi, double vlo, double vhi) {
    int pieces = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<double> bp;
    for (int i = 1; i < pieces; ++i) bp.push_back(uni(0.05, 0.95) * hi);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> vals;
    for (std::size_t i = 0; i <= bp.size(); ++i) vals.push_back(uni(vlo, vhi));
    return PiecewiseConstant(0.0, hi, bp, vals);
  };
  ScenarioData s;
  s.name = "random-" + std::to_string(seed);
  s.t_max = t_max;
  s.rho0 = fn(1.0, 0.5, 2.0);
  s.u0 = fn(1.0, -3.0, 3.0);
  s.rho_bl = fn(t_max, 0.5, 2.0);
  s.u_bl = fn(t_max, 0.5, 3.0);
  s.rho_br = fn(t_max, 0.5, 2.0);
  s.u_br = fn(t_max, -3.0, -0.5);
  return s;
}

ScenarioData builtin_scenario(const std::string& name) {
  if (name == "s1") return scenario_s1();
  if (name == "s2") return scenario_s2();
  if (name == "s3") return scenario_s3();
  if (name == "s4") return scenario_s4();
  throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

namespace {

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw std::invalid_argument(where + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw std::invalid_argument(where + ": NaN/Inf not allowed");
  return d;
}

PiecewiseConstant read_function(const json& root, const char* key, double hi) {
  if (!root.contains(key)) throw std::invalid_argument(std::string("scenario: missing '") + key + "'");
  const json& f = root.at(key);
  if (!f.is_object() || !f.contains("values"))
    throw std::invalid_argument(std::string(key) + ": expected {breakpoints, values}");
  std::vector<double> bp, vals;
  if (f.contains("breakpoints")) {
    if (!f.at("breakpoints").is_array())
      throw std::invalid_argument(std::string(key) + ".breakpoints: expected an array");
    for (const auto& b : f.at("breakpoints"))
      bp.push_back(finite_number(b, std::string(key) + ".breakpoints"));
  }
  if (!f.at("values").is_array())
    throw std::invalid_argument(std::string(key) + ".values: expected an array");
  for (const auto& v : f.at("values")) vals.push_back(finite_number(v, std::string(key) + ".values"));
  try {
    return PiecewiseConstant(0.0, hi, bp, vals);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(key) + ": " + e.what());
  }
}

json function_json(const PiecewiseConstant& f) {
  return json{{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

}  // namespace

ScenarioData scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("scenario JSON: expected an object");
  ScenarioData s;
  s.name = root.value("name", std::string("custom"));
  if (!root.contains("t_max")) throw std::invalid_argument("scenario: missing 't_max'");
  s.t_max = finite_number(root.at("t_max"), "t_max");
  if (!(s.t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
  s.rho0 = read_function(root, "rho0", 1.0);
  s.u0 = read_function(root, "u0", 1.0);
  s.rho_bl = read_function(root, "rho_bl", s.t_max);
  s.u_bl = read_function(root, "u_bl", s.t_max);
  s.rho_br = read_function(root, "rho_br", s.t_max);
  s.u_br = read_function(root, "u_br", s.t_max);
  return s;
}

ScenarioData load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

std::string scenario_to_json(const ScenarioData& s) {
  json root{{"name", s.name},
            {"t_max", s.t_max},
            {"rho0", function_json(s.rho0)},
            {"u0", function_json(s.u0)},
            {"rho_bl", function_json(s.rho_bl)},
            {"u_bl", function_json(s.u_bl)},
            {"rho_br", function_json(s.rho_br)},
            {"u_br", function_json(s.u_br)}};
  return root.dump(2);
}

}  // namespace strip_psg
