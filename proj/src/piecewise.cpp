#include "strip_psg/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace strip_psg {

namespace {

double upow(double u, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= u;
  return r;
}

// ∫_a^b η^j dη for j in {0,1}
double eta_moment(int j, double a, double b) {
  return j == 0 ? b - a : 0.5 * (b - a) * (b + a);
}

std::vector<double> merged_nodes(const PiecewiseConstant& f, const PiecewiseConstant& g,
                                 double lo, double hi) {
  std::vector<double> nodes{lo};
  for (const auto* p : {&f.breakpoints(), &g.breakpoints()})
    for (double b : *p)
      if (b > lo && b < hi) nodes.push_back(b);
  nodes.push_back(hi);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace

PiecewiseConstant::PiecewiseConstant(double domain_lo, double domain_hi,
                                     std::vector<double> breakpoints,
                                     std::vector<double> values)
    : lo_(domain_lo), hi_(domain_hi), breaks_(std::move(breakpoints)), values_(std::move(values)) {
  if (!std::isfinite(lo_) || !std::isfinite(hi_) || !(lo_ < hi_))
    throw std::invalid_argument("PiecewiseConstant: need finite domain_lo < domain_hi");
  if (values_.size() != breaks_.size() + 1)
    throw std::invalid_argument("PiecewiseConstant: values must number breakpoints+1");
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    double b = breaks_[i];
    if (!std::isfinite(b) || b <= lo_ || b >= hi_)
      throw std::invalid_argument("PiecewiseConstant: breakpoint outside open domain");
    if (i > 0 && b <= breaks_[i - 1])
      throw std::invalid_argument("PiecewiseConstant: breakpoints not strictly increasing");
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("PiecewiseConstant: non-finite value");
}

PiecewiseConstant PiecewiseConstant::constant(double domain_lo, double domain_hi, double value) {
  return PiecewiseConstant(domain_lo, domain_hi, {}, {value});
}

std::size_t PiecewiseConstant::piece_index(double x) const {
  if (!(x >= lo_ && x <= hi_))
    throw std::domain_error("PiecewiseConstant: x=" + std::to_string(x) + " outside [" +
                            std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                  breaks_.begin());
}

double PiecewiseConstant::eval(double x) const { return values_[piece_index(x)]; }

double PiecewiseConstant::left_limit(double x) const {
  if (!(x > lo_ && x <= hi_))
    throw std::domain_error("PiecewiseConstant: no left limit at x=" + std::to_string(x));
  auto i = std::lower_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
  return values_[static_cast<std::size_t>(i)];
}

double PiecewiseConstant::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double PiecewiseConstant::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double moment_integral(const PiecewiseConstant& density, const PiecewiseConstant& velocity,
                       const MomentSpec& spec, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("moment_integral: lo > hi");
  if (spec.velocity_power < 0 || spec.velocity_power > 3)
    throw std::invalid_argument("moment_integral: velocity_power must be 0..3");
  if (!std::isfinite(spec.c0) || !std::isfinite(spec.c1))
    throw std::invalid_argument("moment_integral: non-finite weight");
  if (lo == hi) return 0.0;
  if (lo < density.domain_lo() || hi > density.domain_hi() || lo < velocity.domain_lo() ||
      hi > velocity.domain_hi())
    throw std::domain_error("moment_integral: interval outside the data domain");

  auto nodes = merged_nodes(density, velocity, lo, hi);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = nodes[i + 1];
    double f = spec.density ? density.eval(a) : 1.0;
    f *= upow(velocity.eval(a), spec.velocity_power);
    sum += f * (spec.c0 * eta_moment(0, a, b) + spec.c1 * eta_moment(1, a, b));
  }
  return sum;
}

DataPair::DataPair(const PiecewiseConstant& rho, const PiecewiseConstant& u) {
  if (rho.domain_lo() != u.domain_lo() || rho.domain_hi() != u.domain_hi())
    throw std::invalid_argument("DataPair: density and velocity domains differ");
  nodes_ = merged_nodes(rho, u, rho.domain_lo(), rho.domain_hi());
  std::size_t n = nodes_.size() - 1;
  rho_.resize(n);
  u_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho_[i] = rho.eval(nodes_[i]);
    u_[i] = u.eval(nodes_[i]);
  }
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 2; ++j) {
      auto& p = prefix_[k * 2 + j];
      p.assign(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        p[i + 1] = p[i] + rho_[i] * upow(u_[i], k) * eta_moment(j, nodes_[i], nodes_[i + 1]);
    }
}

std::size_t DataPair::piece_of(double s) const {
  if (!(s >= nodes_.front() && s <= nodes_.back()))
    throw std::domain_error("DataPair: s=" + std::to_string(s) + " outside data domain");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, rho_.size() - 1);
}

double DataPair::cumulative(int k, int j, double s) const {
  std::size_t i = piece_of(s);
  return prefix_[k * 2 + j][i] + rho_[i] * upow(u_[i], k) * eta_moment(j, nodes_[i], s);
}

}  // namespace strip_psg
