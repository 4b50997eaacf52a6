#include "strip_psg/particle_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "strip_psg/fields.hpp"
#include "strip_psg/parallel.hpp"

namespace strip_psg {

namespace {

constexpr double kContact = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest x with ∫_0^x ρ0 >= label.
double quantile(const DataPair& p, double label) {
  const auto& nodes = p.nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double rho = p.piece_rho(i);
    double hi = p.cumulative(0, 0, nodes[i + 1]);
    if (rho > 0.0 && hi >= label) {
      double lo = p.cumulative(0, 0, nodes[i]);
      return std::clamp(nodes[i] + (label - lo) / rho, nodes[i], nodes[i + 1]);
    }
  }
  return nodes.back();
}

void schedule_wall(const DataPair& p, bool left, double t_max, double target, bool jitter,
                   std::mt19937_64& rng, std::vector<ParticleSystem::Injection>& out) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto& nodes = p.nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = std::min(nodes[i + 1], t_max);
    if (!(b > a)) continue;
    double v = p.piece_u(i);
    double flux = p.piece_rho(i) * (left ? v : -v);
    if (!(flux > 0.0)) continue;
    double mass = flux * (b - a);
    int k = std::max(1, static_cast<int>(std::ceil(mass / target - 1e-9)));
    double dt = (b - a) / k;
    for (int j = 0; j < k; ++j) {
      double off = jitter ? U(rng) : 0.5;
      out.push_back({a + (j + off) * dt, left, flux * dt, v});
    }
  }
}

}  // namespace

ParticleSystem init_particles(const Scenario& s, int n, std::uint64_t seed, OracleOptions opt) {
  if (n < 1) throw std::invalid_argument("init_particles: n must be >= 1");
  ParticleSystem ps;
  const DataPair& init = s.initial();
  double m0 = s.initial_mass();
  ps.initial_mass_ = m0;
  ps.rule_ = opt.wall;
  if (m0 > 0.0) {
    for (int k = 0; k < n; ++k) {
      double x = quantile(init, (k + 0.5) * m0 / n);
      ps.positions.push_back(x);
      ps.velocities.push_back(s.data().u0(x));
      ps.masses.push_back(m0 / n);
    }
  }
  double target = opt.injection_mass > 0.0 ? opt.injection_mass : s.total_mass(s.t_max()) / n;
  std::mt19937_64 rng(seed);
  schedule_wall(s.left(), true, s.t_max(), target, opt.jitter, rng, ps.schedule_);
  schedule_wall(s.right(), false, s.t_max(), target, opt.jitter, rng, ps.schedule_);
  std::stable_sort(ps.schedule_.begin(), ps.schedule_.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
  // particles that start in contact and approach stick at once
  ps.merge_contacts();
  return ps;
}

double ParticleSystem::total_mass() const {
  double sum = wall_mass_left + wall_mass_right;
  for (double m : masses) sum += m;
  return sum;
}

double ParticleSystem::total_momentum() const {
  double sum = wall_momentum_left + wall_momentum_right;
  for (std::size_t i = 0; i < masses.size(); ++i) sum += masses[i] * velocities[i];
  return sum;
}

std::string ParticleSystem::dump(std::size_t around) const {
  std::ostringstream os;
  os.precision(17);
  os << "clock=" << clock << " particles=" << positions.size() << " walls=(" << wall_mass_left
     << "," << wall_mass_right << ") next_injection=" << next_ << "/" << schedule_.size() << "\n";
  std::size_t lo = 0, hi = positions.size();
  if (around < positions.size()) {
    lo = around >= 5 ? around - 5 : 0;
    hi = std::min(positions.size(), around + 6);
  }
  for (std::size_t i = lo; i < hi; ++i)
    os << "  [" << i << "] x=" << positions[i] << " v=" << velocities[i] << " m=" << masses[i]
       << "\n";
  return os.str();
}

void ParticleSystem::move(double dt) {
  if (dt <= 0.0) return;
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] += velocities[i] * dt;
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    double gap = positions[i + 1] - positions[i];
    if (gap < -1e-9)
      throw std::logic_error("particle oracle: particles crossed\n" + dump(i));
    if (gap < 0.0) positions[i + 1] = positions[i];
  }
  for (double& x : positions) {
    if (x < -1e-9 || x > 1.0 + 1e-9)
      throw std::logic_error("particle oracle: particle left the strip\n" + dump());
    x = std::clamp(x, 0.0, 1.0);
  }
}

void ParticleSystem::merge_contacts() {
  bool again = true;
  while (again) {
    again = false;
    std::vector<double> x, v, m;
    x.reserve(positions.size());
    v.reserve(positions.size());
    m.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size();) {
      std::size_t j = i;
      double mass = masses[i], mom = masses[i] * velocities[i], mx = masses[i] * positions[i];
      while (j + 1 < positions.size() && positions[j + 1] - positions[j] <= kContact &&
             velocities[j] > velocities[j + 1]) {
        ++j;
        mass += masses[j];
        mom += masses[j] * velocities[j];
        mx += masses[j] * positions[j];
      }
      if (j > i) {
        collisions += static_cast<long>(j - i);
        again = true;
        double lo = std::min(velocities[i], velocities[j]), hi = std::max(velocities[i], velocities[j]);
        for (std::size_t k = i; k <= j; ++k) {
          lo = std::min(lo, velocities[k]);
          hi = std::max(hi, velocities[k]);
        }
        x.push_back(std::clamp(mx / mass, positions[i], positions[j]));
        v.push_back(std::clamp(mom / mass, lo, hi));
      } else {
        x.push_back(positions[i]);
        v.push_back(velocities[i]);
      }
      m.push_back(mass);
      i = j + 1;
    }
    positions.swap(x);
    velocities.swap(v);
    masses.swap(m);
  }
}

void ParticleSystem::capture_at_walls() {
  // Inflow velocities point into the strip, so an injected particle is never
  // taken back by its own wall unless a collision has turned it around.
  std::size_t front = 0;
  while (front < positions.size() && positions[front] <= kContact && velocities[front] <= 0.0) {
    wall_mass_left += masses[front];
    if (rule_ == WallRule::Momentum) wall_momentum_left += masses[front] * velocities[front];
    ++front;
    ++captures;
  }
  std::size_t back = positions.size();
  while (back > front && positions[back - 1] >= 1.0 - kContact && velocities[back - 1] >= 0.0) {
    wall_mass_right += masses[back - 1];
    if (rule_ == WallRule::Momentum) wall_momentum_right += masses[back - 1] * velocities[back - 1];
    --back;
    ++captures;
  }
  if (front == 0 && back == positions.size()) return;
  positions = std::vector<double>(positions.begin() + front, positions.begin() + back);
  velocities = std::vector<double>(velocities.begin() + front, velocities.begin() + back);
  masses = std::vector<double>(masses.begin() + front, masses.begin() + back);
}

void ParticleSystem::release_from_walls() {
  if (rule_ != WallRule::Momentum) return;
  if (wall_mass_left > 0.0 && wall_momentum_left > 0.0) {
    positions.insert(positions.begin(), 0.0);
    velocities.insert(velocities.begin(), wall_momentum_left / wall_mass_left);
    masses.insert(masses.begin(), wall_mass_left);
    wall_mass_left = wall_momentum_left = 0.0;
    ++releases;
  }
  if (wall_mass_right > 0.0 && wall_momentum_right < 0.0) {
    positions.push_back(1.0);
    velocities.push_back(wall_momentum_right / wall_mass_right);
    masses.push_back(wall_mass_right);
    wall_mass_right = wall_momentum_right = 0.0;
    ++releases;
  }
}

// Contacts, captures and releases until nothing changes.
void ParticleSystem::settle() {
  for (int guard = 0;; ++guard) {
    if (guard > 1000) throw std::logic_error("particle oracle: wall events do not settle\n" + dump());
    merge_contacts();
    capture_at_walls();
    long before = releases;
    release_from_walls();
    if (releases == before) return;
  }
}

void ParticleSystem::advance(double t_target) {
  if (!(t_target >= clock)) throw std::invalid_argument("advance: target time is before the clock");
  while (true) {
    bool due = next_ < schedule_.size() && schedule_[next_].time <= t_target;
    double dt_inj = due ? std::max(0.0, schedule_[next_].time - clock) : kInf;
    double dt = std::min(dt_inj, t_target - clock);
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
      double dv = velocities[i] - velocities[i + 1];
      if (dv > 0.0) dt = std::min(dt, (positions[i + 1] - positions[i]) / dv);
    }
    if (!positions.empty()) {
      if (velocities.front() < 0.0) dt = std::min(dt, positions.front() / -velocities.front());
      if (velocities.back() > 0.0) dt = std::min(dt, (1.0 - positions.back()) / velocities.back());
    }
    dt = std::max(dt, 0.0);
    bool at_end = dt >= t_target - clock;
    move(dt);
    clock = at_end ? t_target : clock + dt;
    // snap particles that were aimed at a wall this step
    if (!positions.empty()) {
      if (velocities.front() < 0.0 && positions.front() <= 1e-12) positions.front() = 0.0;
      if (velocities.back() > 0.0 && positions.back() >= 1.0 - 1e-12) positions.back() = 1.0;
    }
    settle();
    while (next_ < schedule_.size() && schedule_[next_].time <= clock) {
      const Injection& in = schedule_[next_++];
      injected_mass_ += in.mass;
      ++injections_done;
      if (rule_ == WallRule::Momentum && (in.left ? wall_mass_left : wall_mass_right) > 0.0) {
        (in.left ? wall_mass_left : wall_mass_right) += in.mass;
        (in.left ? wall_momentum_left : wall_momentum_right) += in.mass * in.velocity;
        settle();
        continue;
      }
      if (in.left) {
        positions.insert(positions.begin(), 0.0);
        velocities.insert(velocities.begin(), in.velocity);
        masses.insert(masses.begin(), in.mass);
      } else {
        positions.push_back(1.0);
        velocities.push_back(in.velocity);
        masses.push_back(in.mass);
      }
      settle();
    }
    bool pending = next_ < schedule_.size() && schedule_[next_].time <= t_target;
    if (clock >= t_target && !pending) break;
  }
}

ParticleSystem advance(ParticleSystem ps, double t_target) {
  ps.advance(t_target);
  return ps;
}

double empirical_m(const ParticleSystem& ps, double x) {
  double sum = ps.wall_mass_left;
  for (std::size_t i = 0; i < ps.positions.size() && ps.positions[i] <= x; ++i) sum += ps.masses[i];
  if (x >= 1.0) sum += ps.wall_mass_right;
  return sum;
}

double heaviest_near(const ParticleSystem& ps, double x, double radius) {
  double best = 0.0;
  for (std::size_t i = 0; i < ps.positions.size(); ++i)
    if (std::abs(ps.positions[i] - x) <= radius) best = std::max(best, ps.masses[i]);
  return best;
}

OracleDistance oracle_distance(const Scenario& s, const ParticleSystem& ps, double t, int grid) {
  if (std::abs(ps.clock - t) > 1e-12) throw std::invalid_argument("oracle: system not advanced to t");
  if (grid < 16) throw std::invalid_argument("oracle: grid must be >= 16");
  OracleDistance out;
  const double M = s.total_mass(t);
  const double h = 1.0 / grid;

  // one-sided solver m on the grid
  std::vector<double> mL(grid + 1), mR(grid + 1);
  parallel_for(static_cast<std::size_t>(grid + 1), [&](std::size_t j) {
    auto c = classify(s, j * h, t);
    mL[j] = m_from(s, c, Side::Left);
    mR[j] = m_from(s, c, Side::Right);
  });
  const double base = mL[0];

  // empirical m is constant on [p_k, p_{k+1})
  std::vector<double> p{0.0}, c;
  double run = base + ps.wall_mass_left;
  std::size_t i = 0;
  while (i < ps.positions.size() && ps.positions[i] <= 0.0) run += ps.masses[i++];
  c.push_back(run);
  while (i < ps.positions.size() && ps.positions[i] < 1.0) {
    double x = ps.positions[i];
    while (i < ps.positions.size() && ps.positions[i] == x) run += ps.masses[i++];
    p.push_back(x);
    c.push_back(run);
  }
  for (; i < ps.positions.size(); ++i) run += ps.masses[i];
  p.push_back(1.0);
  c.push_back(run + ps.wall_mass_right);

  // table lookups are conservative: the lower bound uses a node left of
  // x-eps, the upper bound a node right of x+eps
  auto lower = [&](double x, double eps) {
    double y = x - eps;
    if (y < 0.0) return -kInf;
    return mL[static_cast<std::size_t>(std::floor(y / h))] - eps * M;
  };
  auto upper = [&](double x, double eps) {
    double y = x + eps;
    if (y >= 1.0) return mR[grid] + eps * M;
    return mR[std::min<std::size_t>(grid, static_cast<std::size_t>(std::ceil(y / h)))] + eps * M;
  };
  auto feasible = [&](double eps) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (c[k] > upper(p[k], eps)) return false;
      double next = k + 1 < p.size() ? p[k + 1] : 1.0;
      if (c[k] < lower(next, eps)) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) hi *= 2.0;
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  out.levy = hi;

  for (int j = 0; j <= grid; ++j) {
    // at a jump node the solver's m is the whole bracket [m(x-), m(x+)]
    double e = base + empirical_m(ps, j * h);
    double gap = std::max({0.0, mL[j] - e, e - mR[j]});
    out.sup = std::max(out.sup, gap / M);
  }

  out.wall_left = std::abs(ps.wall_mass_left - (mR[0] - mL[0])) / M;
  out.wall_right = std::abs(ps.wall_mass_right - (mR[grid] - mL[grid])) / M;
  auto atoms = measure_at(s, t, 512).interior_atoms;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atoms[k].mass < 1e-2 * M) continue;
    double r = 0.02;
    if (k > 0) r = std::min(r, 0.5 * (atoms[k].x - atoms[k - 1].x));
    if (k + 1 < atoms.size()) r = std::min(r, 0.5 * (atoms[k + 1].x - atoms[k].x));
    double d = std::abs(heaviest_near(ps, atoms[k].x, r) - atoms[k].mass) / M;
    if (d > out.interior_atoms) {
      out.interior_atoms = d;
      out.worst_atom_x = atoms[k].x;
    }
  }
  return out;
}

CheckReport compare(const Scenario& s, const ParticleSystem& ps, double t, int grid, double tol) {
  CheckReport rep;
  rep.name = "oracle";
  rep.tolerance = tol;
  auto d = oracle_distance(s, ps, t, grid);
  rep.observe(d.levy, 0.5, t);
  rep.observe(d.wall_left, 0.0, t);
  rep.observe(d.wall_right, 1.0, t);
  rep.observe(d.interior_atoms, d.worst_atom_x, t);
  std::ostringstream note;
  note.precision(6);
  note << "levy=" << d.levy << " sup=" << d.sup << " atoms=" << d.interior_atoms
       << " particles=" << ps.positions.size();
  rep.note = note.str();
  rep.finish();
  return rep;
}

}  // namespace strip_psg
