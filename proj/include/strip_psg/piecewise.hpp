#pragma once

#include <cstddef>
#include <vector>

namespace strip_psg {

// Piecewise-constant function on [domain_lo, domain_hi]. Right-continuous at
// breakpoints; at domain_hi the last piece's value is returned.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(double domain_lo, double domain_hi, std::vector<double> breakpoints,
                    std::vector<double> values);

  static PiecewiseConstant constant(double domain_lo, double domain_hi, double value);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  double left_limit(double x) const;

  std::size_t piece_index(double x) const;
  std::size_t piece_count() const { return values_.size(); }

  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  double min_value() const;
  double max_value() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> breaks_;
  std::vector<double> values_{0.0};
};

// Integrand selector for moment integrals: weight(η) · ρ^[density] · u^velocity_power.
// velocity_power 1 is the velocity factor, 2 is velocity², 3 is both.
struct MomentSpec {
  bool density = true;
  int velocity_power = 0;
  double c0 = 1.0;
  double c1 = 0.0;
};

// ∫_lo^hi (c0 + c1 η) ρ^d u^k dη, exact piece by piece.
double moment_integral(const PiecewiseConstant& density, const PiecewiseConstant& velocity,
                       const MomentSpec& spec, double lo, double hi);

// A (density, velocity) pair with merged pieces and prefix sums, so that
// ∫_0^s ρ u^k η^j dη (k ≤ 2, j ≤ 1) costs one binary search.
class DataPair {
 public:
  DataPair() = default;
  DataPair(const PiecewiseConstant& rho, const PiecewiseConstant& u);

  // ∫_lo^hi ρ u^k η^j, k in {0,1,2}, j in {0,1}.
  double integral(int k, int j, double lo, double hi) const {
    return cumulative(k, j, hi) - cumulative(k, j, lo);
  }
  double cumulative(int k, int j, double s) const;

  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  // Merged piece boundaries, including both domain ends.
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t piece_count() const { return rho_.size(); }
  double piece_rho(std::size_t i) const { return rho_[i]; }
  double piece_u(std::size_t i) const { return u_[i]; }
  std::size_t piece_of(double s) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> rho_;
  std::vector<double> u_;
  // prefix_[k*2+j][i] = integral from nodes_[0] to nodes_[i].
  std::vector<double> prefix_[6];
};

}  // namespace strip_psg
