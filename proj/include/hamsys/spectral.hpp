#pragma once

#include <string>
#include <vector>

#include "hamsys/domain.hpp"
#include "hamsys/functional.hpp"
#include "hamsys/solver.hpp"

namespace hamsys {

struct Eigenpair {
  double lambda = 0.0;
  std::vector<double> vec;
  int iterations = 0;
};

// Smallest eigenpair of K x = lambda M x for a symmetric positive definite
// tridiagonal K (diag, off) and a nonnegative diagonal M, by shifted inverse
// iteration with Thomas solves. The shift must lie below the smallest eigenvalue.
Eigenpair smallest_tridiagonal_eigenpair(const std::vector<double>& diag, const std::vector<double>& off,
                                         const std::vector<double>& mass, double shift, double tol,
                                         int max_iter = 20000);

struct HardyReport {
  double estimate = 0.0;     // extrapolated to infinite truncation
  double lower_bound = 0.0;  // (N - 2)^2 / 4
  std::vector<double> truncations;  // R_out_hardy / R
  std::vector<double> values;       // estimate at each truncation
  double extrapolation_gap = 0.0;   // |three-point - two-point extrapolation|
  double step = 0.0;                // mesh width in log(r / R)
};

// Smallest Rayleigh quotient of int |grad phi|^2 / int phi^2 / |x|^2 over
// radial phi vanishing at r = R and at R_out_hardy in {10R, 40R, 160R},
// extrapolated in the truncation. Computed in t = log(r / R), where the
// quotient reads int e^{(N-2)t} phi_t^2 / int e^{(N-2)t} phi^2.
HardyReport hardy_constant(const DomainSpec& spec, double tol = 1e-10, double step = 1e-3);

// The same quotient at a single truncation R_out / R on a 1-D mesh of the
// given width in log(r / R).
double hardy_radial_at(int N, double truncation, double step = 1e-3);

// The Hardy quotient minimized over all (r, theta) fields of the 2-D grid
// (Dirichlet at R and R_out), by inverse iteration with a sparse Cholesky.
double hardy_reduced_2d(const DomainSpec& spec, double tol = 1e-12);

struct AngularEigenpair {
  double mu = 0.0;          // discrete counterpart of 2N
  std::vector<double> eta;  // normalized with eta(0) < 0 and max |eta| = 1
};

// First nonconstant eigenpair of the discrete angular operator of the grid.
AngularEigenpair angular_eigenpair(const Grid& grid);

// max |-eta'' + kappa eta' - 2N eta| over n_samples angles in
// [1e-3, pi/2 - 1e-3] for eta = (m-n)/N - cos 2 theta, together with the
// endpoint derivative check |eta'(0)| + |eta'(pi/2)|.
struct AngularCheck {
  double residual = 0.0;
  double endpoint_derivative = 0.0;
};
AngularCheck angular_eigen_check(int m, int n, int n_samples);

struct RadialEigenpair {
  double lambda = 0.0;
  std::vector<double> phi;  // on the grid radii, phi(R) = phi(R_out) = 0, max phi = 1
  std::vector<double> potential;  // vbar^{(p-2)/2} ubar^{(q-2)/2}
  int iterations = 0;
};

// -phi'' - (N-1)phi'/r + mu phi/r^2 + phi = lambda V phi, V from the
// theta-averages of u and v, discretized with the radial part of the grid
// operator. mu defaults to 2N when negative.
RadialEigenpair radial_eigenpair(const Field& u, const Field& v, const ExponentPair& ep,
                                 double tol = 1e-12, double mu = -1.0);

// (p'-1) sum w a^{1-p'} |Au|^{p'-2} (Aw)^2 - (q-1) sum w b |u|^{q-2} w^2
double second_variation(const Field& u, const Field& w, const WeightPair& wp, const ExponentPair& ep);

// ((p'-1) lambda^2 - (q-1)) sum w |u|^{q-2} w^2, valid for a = b = 1 and w = phi eta.
double second_variation_closed(const Field& u, const Field& w, double lambda, const ExponentPair& ep);

struct ComparisonReport {
  double min_value = 0.0;  // min over nodes of q v^p - p u^q
  double scale = 0.0;      // max over nodes of max(q v^p, p u^q)
  double r_at_min = 0.0;
  double theta_at_min = 0.0;
  bool pass = true;
};

ComparisonReport comparison_check(const Field& u, const Field& v, const ExponentPair& ep, double tol);

struct RayleighReport {
  double quotient = 0.0;
  double bound = 0.0;  // sqrt(q / p)
  bool pass = true;
};

// <Av, v>_w / sum w v^{(p+2)/2} u^{(q-2)/2}; pass iff quotient <= bound (1 + tol).
RayleighReport rayleigh_bound_check(const Field& u, const Field& v, const ExponentPair& ep, double tol = 1e-3);

struct SpectralReport {
  double hardy_constant = 0.0;
  double lambda1 = 0.0;
  std::vector<double> phi;
  double mu1 = 0.0;
  double mu1_residual = 0.0;  // |mu_h - 2N|
  double criterion_lhs = 0.0;
  double criterion_rhs = 0.0;
  double second_variation = 0.0;         // general form with w = phi eta_h
  double second_variation_closed = 0.0;  // ((p'-1) lambda^2 - (q-1)) int u^{q-2} w^2
  double rayleigh_quotient = 0.0;  // at phi = v
  bool verdict = false;  // criterion_lhs > criterion_rhs
};

double criterion_rhs(int N, double hardy, double p, double q);
bool symmetry_breaking_predicted(int N, double hardy, double p, double q);

// Spectral quantities around a converged pair (u, v) with a = b = 1. The
// closed form of the second variation agrees with the general one only when u
// is theta-independent (the radial candidate).
SpectralReport spectral_report(const SolutionPair& sp, const ExponentPair& ep, double hardy);

struct SymmetryVerdict {
  bool predicted = false;
  bool observed = false;
  bool discrepancy = false;  // predicted but not observed
  std::string label;
};

SymmetryVerdict symmetry_verdict(const SolutionPair& sp, const SpectralReport& report, double radial_tol);

}  // namespace hamsys
