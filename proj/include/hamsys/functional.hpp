#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hamsys/domain.hpp"
#include "hamsys/elliptic.hpp"

namespace hamsys {

struct ExponentPair {
  double p = 0.0;
  double q = 0.0;
  double p_conj = 0.0;  // p / (p - 1)
  double q_conj = 0.0;  // q / (q - 1)
  int N = 0;
  int n = 0;
  bool supercritical = false;  // 1/p + 1/q < 1 - 2/N
  bool window_ok = false;      // n <= (p+1)/(p-1)  or  1/p + 1/q > 1 - 2/(n+1)

  // Throws ValidationError unless q >= p > 2.
  static ExponentPair make(double p, double q, int N, int n);
};

struct WeightPair {
  std::string name;
  Field a;
  Field b;
  double a0 = 0.0;  // lower bounds, taken as the grid minima
  double b0 = 0.0;
};

// "ones", "s-squared" (a = b = 1 + s^2, s = r cos theta), or a path to a CSV
// table with header r,theta,a,b on a tensor grid (bilinear interpolation,
// clamped at the table edges).
WeightPair make_weights(const std::string& preset, const GridPtr& grid);

struct WeightReport {
  bool pass = true;
  double min_a = 0.0, min_b = 0.0;
  double max_a = 0.0, max_b = 0.0;
  // max over interior nodes of the forward theta-difference quotient, which
  // equals s a_t - t a_s in the reduced coordinates
  double worst_a_theta = 0.0;
  double worst_b_theta = 0.0;
  std::string message;
};

WeightReport validate_weights(const WeightPair& wp, double tol);

struct EnergyTerms {
  double psi = 0.0;  // (1/p') sum w |Au|^{p'} a^{1-p'}
  double phi = 0.0;  // (1/q) sum w b |u|^q
  double value() const { return psi - phi; }
};

struct SzulkinReport {
  double min_slack = 0.0;
  std::size_t trials = 0;
  bool pass = true;
};

// I(u) = Psi(u) - Phi(u) for fields vanishing on both radial boundaries (the
// boundary rows of every argument are ignored).
class ReducedFunctional {
 public:
  ReducedFunctional(const HelmholtzSystem& sys, WeightPair wp, ExponentPair ep);

  const HelmholtzSystem& system() const { return *sys_; }
  const WeightPair& weights() const { return wp_; }
  const ExponentPair& exponents() const { return ep_; }

  // v = |Au|^{p'-1} a^{-(p'-1)}
  Field inversion_map(const Field& u) const;
  EnergyTerms energy(const Field& u) const;
  double psi(const Field& u) const;
  // b |u|^{q-2} u on interior rows
  Field phi_gradient(const Field& u) const;
  // G with <G, h>_w = dI(u)[h]
  Field gradient(const Field& u) const;
  // unique t > 0 maximizing I(t u); DegenerateDirectionError if Phi(u) = 0
  double nehari_scale(const Field& u) const;
  SzulkinReport szulkin_check(const Field& u, const std::vector<Field>& trials, double tol) const;

  static constexpr double kGradientEps = 1e-12;

 private:
  const HelmholtzSystem* sys_;
  WeightPair wp_;
  ExponentPair ep_;
  std::vector<double> alpha_;  // a^{-(p'-1)}
};

// Free-function forms building the operator from the field's grid.
Field inversion_map(const Field& u, const WeightPair& wp, const ExponentPair& ep);
EnergyTerms energy(const Field& u, const WeightPair& wp, const ExponentPair& ep);
Field energy_gradient(const Field& u, const WeightPair& wp, const ExponentPair& ep);
double nehari_scale(const Field& u, const WeightPair& wp, const ExponentPair& ep);
SzulkinReport szulkin_check(const Field& u, const WeightPair& wp, const ExponentPair& ep,
                            const std::vector<Field>& trials, double tol);

// cone_project(u + delta max|u| xi_k), xi_k uniform in [-1, 1] on interior
// nodes, drawn from one mt19937_64 stream.
std::vector<Field> cone_directions(const Field& u, std::size_t count, double delta,
                                   std::uint64_t seed);

}  // namespace hamsys
