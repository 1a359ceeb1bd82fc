#pragma once

#include <cmath>
#include <random>

#include "hamsys/domain.hpp"

namespace testing {

inline hamsys::GridPtr grid(int N, int m, int n, int n_r, int n_theta, double R = 1.0, double R_out = 10.0) {
  hamsys::DomainSpec s;
  s.N = N;
  s.m = m;
  s.n = n;
  s.R = R;
  s.R_out = R_out;
  s.n_r = n_r;
  s.n_theta = n_theta;
  return hamsys::build_grid(s);
}

// uniform [lo, hi] on interior rows, zero on both radial boundaries
inline hamsys::Field random_field(const hamsys::GridPtr& g, std::mt19937_64& rng, double lo = -1.0,
                                  double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  hamsys::Field f(g);
  for (std::size_t i = 1; i + 1 < g->nr; ++i)
    for (std::size_t j = 0; j < g->nt; ++j) f(i, j) = U(rng);
  return f;
}

// (r - R)(R_out - r) e^{-(r - R)} times cos^k(theta)
inline hamsys::Field bump(const hamsys::GridPtr& g, int k = 0) {
  const double R = g->spec.R, Ro = g->spec.R_out;
  return hamsys::Field::sample(
      g, [&](double r, double t) { return (r - R) * (Ro - r) * std::exp(-(r - R)) * std::pow(std::cos(t), k); });
}

inline double max_abs(const hamsys::Field& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

inline double rel_diff(const hamsys::Field& a, const hamsys::Field& b) {
  hamsys::Field d(a.grid);
  for (std::size_t k = 0; k < d.size(); ++k) d.values[k] = a.values[k] - b.values[k];
  return hamsys::norm(d) / hamsys::norm(b);
}

}  // namespace testing
