#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strip_psg/piecewise.hpp"

namespace strip_psg {

struct ScenarioData {
  std::string name;
  PiecewiseConstant rho0, u0;      // on [0,1]
  PiecewiseConstant rho_bl, u_bl;  // on [0,t_max], inflow at x=0
  PiecewiseConstant rho_br, u_br;  // on [0,t_max], inflow at x=1
  double t_max = 1.0;
};

// Immutable problem data with cached moment tables. Construction checks only
// structure (domains); sign constraints are reported by validate().
class Scenario {
 public:
  explicit Scenario(ScenarioData data);

  const ScenarioData& data() const { return d_; }
  const std::string& name() const { return d_.name; }
  double t_max() const { return d_.t_max; }

  const DataPair& initial() const { return init_; }
  const DataPair& left() const { return left_; }
  const DataPair& right() const { return right_; }

  double initial_mass() const { return m0_; }      // ∫_0^1 ρ0
  double initial_momentum() const { return q0_; }  // ∫_0^1 ρ0 u0

  // Mass that has entered through the walls up to time t.
  double inflow_left(double t) const { return left_.cumulative(1, 0, t); }
  double inflow_right(double t) const { return -right_.cumulative(1, 0, t); }
  double total_mass(double t) const { return m0_ + inflow_left(t) + inflow_right(t); }

  double max_density() const;
  // max |u| over all data
  double speed_scale() const;
  // max u - min u over all data
  double speed_range() const;
  // Sorted breakpoints of the boundary data in (0, t_max).
  std::vector<double> boundary_breakpoints() const;

  void require_time(double t) const;

 private:
  ScenarioData d_;
  DataPair init_, left_, right_;
  double m0_ = 0.0;
  double q0_ = 0.0;
};

struct Violation {
  std::string field;
  std::size_t piece = 0;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

ValidationReport validate(const ScenarioData& s);
inline ValidationReport validate(const Scenario& s) { return validate(s.data()); }

// Built-in Riemann-type scenarios.
// s1: u0=a, u_bl=btilde, u_br=b with a<b<0<btilde, btilde+a>0 (right-wall concentration)
// s2: u0=a, u_bl=btilde, u_br=b with 0<btilde<a<-b (left-wall concentration)
// s3: u0 = 2|-2 split at 1/2; boundary speeds 2,-2 switching to 3,-3 at t=1/2
// s4: u0 = 2|-2 split at 1/2; boundary speeds 1,-1
ScenarioData scenario_s1(double a = -2.0, double b = -1.0, double btilde = 3.0,
                         double t_max = 2.5);
ScenarioData scenario_s2(double a = 2.0, double btilde = 1.0, double b = -3.0,
                         double t_max = 2.5);
ScenarioData scenario_s3(double t_max = 1.5);
ScenarioData scenario_s4(double t_max = 1.5);

// Seeded random piecewise data (1-4 pieces per function), for property suites.
ScenarioData random_scenario(std::uint64_t seed, double t_max = 1.0);

// name in {s1,s2,s3,s4}; throws std::invalid_argument otherwise.
ScenarioData builtin_scenario(const std::string& name);

// JSON schema: {"name"?: str, "t_max": num, "rho0"|"u0"|"rho_bl"|"u_bl"|"rho_br"|"u_br":
//   {"breakpoints": [num...], "values": [num...]}}
ScenarioData scenario_from_json(const std::string& text);
ScenarioData load_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioData& s);

}  // namespace strip_psg
