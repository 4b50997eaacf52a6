#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strip_psg/verification.hpp"

namespace strip_psg {

// Inert: captured mass is frozen with velocity 0 and injected particles
// always start free. Momentum: each wall holds a pinned sticky cluster that
// keeps the momentum of what it captured, absorbs injected mass while it
// holds any, and is released into the strip once its momentum points inward.
enum class WallRule { Inert, Momentum };

struct OracleOptions {
  // Target mass of an injected particle; 0 means total_mass(t_max)/n.
  double injection_mass = 0.0;
  // Shift each injection time uniformly inside its sub-interval.
  bool jitter = false;
  WallRule wall = WallRule::Inert;
};

// Sticky particles on [0,1] with inflow injection and inert wall masses.
class ParticleSystem {
 public:
  struct Injection {
    double time = 0.0;
    bool left = true;
    double mass = 0.0;
    double velocity = 0.0;
  };

  std::vector<double> positions, velocities, masses;
  double wall_mass_left = 0.0, wall_mass_right = 0.0;
  double wall_momentum_left = 0.0, wall_momentum_right = 0.0;  // Momentum rule only
  double clock = 0.0;

  // Events processed so far, for diagnostics.
  long collisions = 0, captures = 0, injections_done = 0, releases = 0;

  const std::vector<Injection>& schedule() const { return schedule_; }
  std::size_t next_injection() const { return next_; }
  double initial_mass() const { return initial_mass_; }
  double injected_mass() const { return injected_mass_; }

  // Wall masses plus interior particles.
  double total_mass() const;
  // Interior particles plus wall momenta (the latter are zero under Inert).
  double total_momentum() const;
  WallRule wall_rule() const { return rule_; }
  void set_wall_rule(WallRule r) { rule_ = r; }

  // Runs events up to t_target (injections at exactly t_target included).
  void advance(double t_target);

  std::string dump(std::size_t around = static_cast<std::size_t>(-1)) const;

 private:
  friend ParticleSystem init_particles(const Scenario&, int, std::uint64_t, OracleOptions);
  std::vector<Injection> schedule_;
  std::size_t next_ = 0;
  WallRule rule_ = WallRule::Inert;
  double initial_mass_ = 0.0;
  double injected_mass_ = 0.0;

  void move(double dt);
  void merge_contacts();
  void capture_at_walls();
  void release_from_walls();
  void settle();
};

// n equal-mass particles at the midpoint quantiles of ρ0, with the boundary
// injection schedule over [0, t_max].
ParticleSystem init_particles(const Scenario& s, int n, std::uint64_t seed = 0,
                              OracleOptions opt = {});
ParticleSystem advance(ParticleSystem ps, double t_target);

// wall_mass_left + mass of particles at positions <= x (+ right wall mass at x >= 1).
// Add m_at(s, 0, t) to compare with the solver's m.
double empirical_m(const ParticleSystem& ps, double x);

// Heaviest particle within `radius` of x (0 if none).
double heaviest_near(const ParticleSystem& ps, double x, double radius);

// Distances between the particle system and the solver at time t, all
// relative to the solver's total mass. `levy` is the Lévy distance between
// the two cumulative mass profiles (x-shifts and mass offsets traded one for
// one); the plain sup norm is kept for the record, it is O(atom mass) when a
// particle cluster sits a hair away from a solver atom. `grid` sets the
// resolution of the solver table.
struct OracleDistance {
  double levy = 0.0;
  double sup = 0.0;
  double wall_left = 0.0, wall_right = 0.0;
  double interior_atoms = 0.0;  // heaviest nearby particle vs each solver atom
  double worst_atom_x = 0.5;
};
OracleDistance oracle_distance(const Scenario& s, const ParticleSystem& ps, double t,
                               int grid = 8192);

// Report over levy, wall and atom discrepancies.
CheckReport compare(const Scenario& s, const ParticleSystem& ps, double t, int grid = 8192,
                    double tol = 0.02);

}  // namespace strip_psg
