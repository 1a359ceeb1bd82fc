#include "hamsys/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hamsys/errors.hpp"

namespace hamsys {

namespace {

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place.
void thomas(std::vector<double> diag, const std::vector<double>& off, std::vector<double>& x) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    x[i] -= w * x[i - 1];
  }
  x[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - off[i] * x[i + 1]) / diag[i];
}

double tri_quadratic(const std::vector<double>& diag, const std::vector<double>& off, const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    acc += diag[i] * x[i] * x[i];
    if (i + 1 < diag.size()) acc += 2.0 * off[i] * x[i] * x[i + 1];
  }
  return acc;
}

double mass_quadratic(const std::vector<double>& mass, const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) acc += mass[i] * x[i] * x[i];
  return acc;
}

// Discrete Hardy quotient on (0, T) in t = log(r/R) with M intervals.
double hardy_log_mesh(int N, double T, std::size_t M, double tol) {
  const double c = N - 2.0;
  const double h = T / static_cast<double>(M);
  const std::size_t n = M - 1;
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0), mass(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k + 1);
    diag[k] = (std::exp(c * (t - 0.5 * h)) + std::exp(c * (t + 0.5 * h))) / (h * h);
    mass[k] = std::exp(c * t);
    if (k + 1 < n) off[k] = -std::exp(c * (t + 0.5 * h)) / (h * h);
  }
  return smallest_tridiagonal_eigenpair(diag, off, mass, 0.25 * c * c, tol).lambda;
}

}  // namespace

namespace {

// relative residual |K x - lambda M x| / |K x|
double tri_residual(const std::vector<double>& diag, const std::vector<double>& off,
                    const std::vector<double>& mass, const std::vector<double>& x, double lambda) {
  const std::size_t n = diag.size();
  double res = 0.0, kx_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double kx = diag[i] * x[i];
    if (i > 0) kx += off[i - 1] * x[i - 1];
    if (i + 1 < n) kx += off[i] * x[i + 1];
    const double d = kx - lambda * mass[i] * x[i];
    res += d * d;
    kx_norm += kx * kx;
  }
  return kx_norm > 0.0 ? std::sqrt(res / kx_norm) : 0.0;
}

}  // namespace

Eigenpair smallest_tridiagonal_eigenpair(const std::vector<double>& diag, const std::vector<double>& off,
                                         const std::vector<double>& mass, double shift, double tol,
                                         int max_iter) {
  const std::size_t n = diag.size();
  if (n == 0 || off.size() + 1 != n || mass.size() != n)
    throw ValidationError("tridiagonal eigenproblem: inconsistent sizes");
  if (std::none_of(mass.begin(), mass.end(), [](double m) { return m > 0.0; }))
    throw UndefinedEigenproblemError("eigenproblem weight vanishes identically");

  Eigenpair ep;
  std::vector<double> x(n, 1.0);
  double lambda = std::numeric_limits<double>::infinity();
  auto step = [&](double sigma) {
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = diag[i] - sigma * mass[i];
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = mass[i] * x[i];
    thomas(shifted, off, y);
    const double nm = std::sqrt(mass_quadratic(mass, y));
    if (!(nm > 0.0) || !std::isfinite(nm)) throw NonConvergenceError("inverse iteration broke down", 0.0);
    for (double& e : y) e /= nm;
    x = std::move(y);
    return tri_quadratic(diag, off, x);
  };
  for (int it = 1; it <= max_iter; ++it) {
    const double next = step(shift);
    ep.iterations = it;
    const bool done = std::abs(next - lambda) <= tol * std::abs(next);
    lambda = next;
    if (done) break;
    if (it == max_iter) throw NonConvergenceError("inverse iteration: iteration cap reached", lambda);
  }
  // polish the eigenvector with a shift just below the converged eigenvalue
  double res = tri_residual(diag, off, mass, x, lambda);
  for (int k = 0; k < 4 && res > 1e-13; ++k) {
    const std::vector<double> keep = x;
    const double next = step(lambda - 1e-6 * std::abs(lambda - shift));
    const double next_res = tri_residual(diag, off, mass, x, next);
    if (!(next_res < res)) {
      x = keep;
      break;
    }
    lambda = next;
    res = next_res;
    ++ep.iterations;
  }
  double big = 0.0;
  for (double e : x)
    if (std::abs(e) > std::abs(big)) big = e;
  for (double& e : x) e /= big;
  ep.lambda = lambda;
  ep.vec = std::move(x);
  return ep;
}

double hardy_radial_at(int N, double truncation, double step) {
  if (!(truncation > 1.0)) throw ValidationError("hardy: truncation must exceed 1");
  const double T = std::log(truncation);
  const auto M = static_cast<std::size_t>(std::max(4.0, std::ceil(T / step)));
  return hardy_log_mesh(N, T, M, 1e-13);
}

HardyReport hardy_constant(const DomainSpec& spec, double tol, double step) {
  spec.validate();
  if (!(step > 0.0) || !(tol > 0.0)) throw ValidationError("hardy: step and tol must be positive");
  HardyReport rep;
  const int N = spec.N;
  rep.lower_bound = 0.25 * (N - 2.0) * (N - 2.0);
  rep.truncations = {10.0, 40.0, 160.0};
  rep.step = step;
  std::vector<double> Ts;
  for (double tr : rep.truncations) {
    const double T = std::log(tr);
    const auto M = static_cast<std::size_t>(std::ceil(T / step));
    Ts.push_back(T);
    rep.values.push_back(hardy_log_mesh(N, T, M, tol));
  }
  Eigen::Matrix3d A;
  Eigen::Vector3d b;
  for (int k = 0; k < 3; ++k) {
    const double s = 1.0 / (Ts[k] * Ts[k]);
    A(k, 0) = 1.0;
    A(k, 1) = s;
    A(k, 2) = s * s;
    b(k) = rep.values[k];
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(b);
  rep.estimate = coef(0);
  const double s1 = 1.0 / (Ts[1] * Ts[1]), s2 = 1.0 / (Ts[2] * Ts[2]);
  const double two_point = (rep.values[2] * s1 - rep.values[1] * s2) / (s1 - s2);
  rep.extrapolation_gap = std::abs(rep.estimate - two_point);
  if (!std::isfinite(rep.estimate) || rep.extrapolation_gap > 1e-3 * std::abs(rep.estimate))
    throw NonConvergenceError("hardy: truncation extrapolation did not settle", rep.extrapolation_gap);
  return rep;
}

double hardy_reduced_2d(const DomainSpec& spec, double tol) {
  const GridPtr g = build_grid(spec);
  const HelmholtzSystem sys(g);
  const Eigen::SparseMatrix<double> A = sys.interior_matrix();
  const auto n = A.rows();
  Eigen::VectorXd w(n), mass(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = 1 + static_cast<std::size_t>(k) / g->nt;
    const std::size_t j = static_cast<std::size_t>(k) % g->nt;
    w[k] = g->weights[g->index(i, j)];
    mass[k] = w[k] / (g->r[i] * g->r[i]);
  }
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SparseMatrix<double> K = w.asDiagonal() * (A - I);
  K = 0.5 * (K + Eigen::SparseMatrix<double>(K.transpose()));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K);
  if (chol.info() != Eigen::Success) throw NonConvergenceError("hardy 2-D: factorization failed", 0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd y = chol.solve(mass.cwiseProduct(x));
    y /= std::sqrt(y.dot(mass.cwiseProduct(y)));
    const double next = y.dot(K * y);
    x = y;
    if (std::abs(next - lambda) <= tol * next) return next;
    lambda = next;
  }
  throw NonConvergenceError("hardy 2-D: inverse iteration cap reached", lambda);
}

AngularEigenpair angular_eigenpair(const Grid& g) {
  const auto nt = static_cast<Eigen::Index>(g.nt);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nt, nt);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nt, nt);
  for (Eigen::Index j = 0; j < nt; ++j) {
    const double V = g.angular_volume[static_cast<std::size_t>(j)];
    M(j, j) = V;
    if (j + 1 < nt) {
      const double f = g.theta_up[static_cast<std::size_t>(j)] * V;
      K(j, j) += f;
      K(j + 1, j + 1) += f;
      K(j, j + 1) -= f;
      K(j + 1, j) -= f;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw NonConvergenceError("angular eigenproblem failed", 0.0);
  AngularEigenpair out;
  out.mu = es.eigenvalues()(1);
  Eigen::VectorXd eta = es.eigenvectors().col(1);
  eta /= eta.cwiseAbs().maxCoeff();
  if (eta(0) > 0.0) eta = -eta;
  out.eta.assign(eta.data(), eta.data() + nt);
  return out;
}

AngularCheck angular_eigen_check(int m, int n, int n_samples) {
  if (m < 2 || n < 2) throw ValidationError("angular check requires m, n >= 2");
  if (n_samples < 2) throw ValidationError("angular check requires at least two samples");
  const int N = m + n;
  const double delta = 1e-3;
  const double hi = 0.5 * std::numbers::pi - delta;
  AngularCheck out;
  for (int k = 0; k < n_samples; ++k) {
    const double t = delta + (hi - delta) * k / (n_samples - 1);
    const double eta = static_cast<double>(m - n) / N - std::cos(2.0 * t);
    const double d1 = 2.0 * std::sin(2.0 * t);
    const double d2 = 4.0 * std::cos(2.0 * t);
    out.residual = std::max(out.residual, std::abs(-d2 + kappa(t, m, n) * d1 - 2.0 * N * eta));
  }
  out.endpoint_derivative = std::abs(2.0 * std::sin(0.0)) + std::abs(2.0 * std::sin(std::numbers::pi));
  return out;
}

RadialEigenpair radial_eigenpair(const Field& u, const Field& v, const ExponentPair& ep, double tol, double mu) {
  require_same_grid(u, v);
  const Grid& g = *u.grid;
  if (mu < 0.0) mu = 2.0 * g.spec.N;
  const auto ub = radial_average(u);
  const auto vb = radial_average(v);
  const std::size_t n = g.nr - 2;
  std::vector<double> diag(n), off(n - 1), mass(n);
  RadialEigenpair out;
  out.potential.assign(g.nr, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k + 1;
    const double pot = std::pow(std::max(vb[i], 0.0), 0.5 * (ep.p - 2.0)) *
                       std::pow(std::max(ub[i], 0.0), 0.5 * (ep.q - 2.0));
    out.potential[i] = pot;
    diag[k] = g.radial_flux[i - 1] + g.radial_flux[i] + (mu / (g.r[i] * g.r[i]) + 1.0) * g.radial_volume[i];
    if (k + 1 < n) off[k] = -g.radial_flux[i];
    mass[k] = g.radial_volume[i] * pot;
  }
  if (std::none_of(mass.begin(), mass.end(), [](double x) { return x > 0.0; }))
    throw UndefinedEigenproblemError("radial eigenproblem: potential vanishes identically");
  const Eigenpair e = smallest_tridiagonal_eigenpair(diag, off, mass, 0.0, tol);
  out.lambda = e.lambda;
  out.iterations = e.iterations;
  out.phi.assign(g.nr, 0.0);
  for (std::size_t k = 0; k < n; ++k) out.phi[k + 1] = e.vec[k];
  return out;
}

double second_variation(const Field& u, const Field& w, const WeightPair& wp, const ExponentPair& ep) {
  require_same_grid(u, w);
  const HelmholtzSystem sys(u.grid);
  const Field x = sys.apply_interior(u);
  const Field aw = sys.apply_interior(w);
  const Grid& g = *u.grid;
  double t1 = 0.0, t2 = 0.0;
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      const double ax = std::abs(x.values[k]);
      if (ax > 0.0)
        t1 += g.weights[k] * std::pow(wp.a.values[k], 1.0 - ep.p_conj) * std::pow(ax, ep.p_conj - 2.0) *
              aw.values[k] * aw.values[k];
      t2 += g.weights[k] * wp.b.values[k] * std::pow(std::abs(u.values[k]), ep.q - 2.0) * w.values[k] * w.values[k];
    }
  return (ep.p_conj - 1.0) * t1 - (ep.q - 1.0) * t2;
}

double second_variation_closed(const Field& u, const Field& w, double lambda, const ExponentPair& ep) {
  require_same_grid(u, w);
  const Grid& g = *u.grid;
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      acc += g.weights[k] * std::pow(std::abs(u.values[k]), ep.q - 2.0) * w.values[k] * w.values[k];
    }
  return ((ep.p_conj - 1.0) * lambda * lambda - (ep.q - 1.0)) * acc;
}

ComparisonReport comparison_check(const Field& u, const Field& v, const ExponentPair& ep, double tol) {
  require_same_grid(u, v);
  const Grid& g = *u.grid;
  ComparisonReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const double a = ep.q * std::pow(std::abs(v(i, j)), ep.p);
      const double b = ep.p * std::pow(std::abs(u(i, j)), ep.q);
      rep.scale = std::max({rep.scale, a, b});
      if (a - b < rep.min_value) {
        rep.min_value = a - b;
        rep.r_at_min = g.r[i];
        rep.theta_at_min = g.theta[j];
      }
    }
  rep.pass = rep.min_value >= -tol;
  return rep;
}

RayleighReport rayleigh_bound_check(const Field& u, const Field& v, const ExponentPair& ep, double tol) {
  require_same_grid(u, v);
  const HelmholtzSystem sys(u.grid);
  const Grid& g = *u.grid;
  const double num = inner(sys.apply_interior(v), v);
  double den = 0.0;
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      den += g.weights[k] * std::pow(std::max(v.values[k], 0.0), 0.5 * (ep.p + 2.0)) *
             std::pow(std::max(u.values[k], 0.0), 0.5 * (ep.q - 2.0));
    }
  if (!(den > 0.0)) throw DegenerateDirectionError("rayleigh_bound_check: zero denominator");
  RayleighReport rep;
  rep.quotient = num / den;
  rep.bound = std::sqrt(ep.q / ep.p);
  rep.pass = rep.quotient <= rep.bound * (1.0 + tol);
  return rep;
}

double criterion_rhs(int N, double hardy, double p, double q) {
  const double f = 1.0 + 2.0 * N / hardy;
  return f * f * (q / p);
}

bool symmetry_breaking_predicted(int N, double hardy, double p, double q) {
  return (p - 1.0) * (q - 1.0) > criterion_rhs(N, hardy, p, q);
}

SpectralReport spectral_report(const SolutionPair& sp, const ExponentPair& ep, double hardy) {
  const Grid& g = *sp.u.grid;
  const int N = g.spec.N;
  SpectralReport rep;
  rep.hardy_constant = hardy;
  rep.criterion_lhs = (ep.p - 1.0) * (ep.q - 1.0);
  rep.criterion_rhs = criterion_rhs(N, hardy, ep.p, ep.q);
  rep.verdict = rep.criterion_lhs > rep.criterion_rhs;

  const AngularEigenpair ang = angular_eigenpair(g);
  rep.mu1 = ang.mu;
  rep.mu1_residual = std::abs(ang.mu - 2.0 * N);
  const WeightPair ones = make_weights("ones", sp.u.grid);
  // v induced by u: |Au|^{p'-2} = v^{2-p} node by node
  const Field v_of_u = inversion_map(sp.u, ones, ep);
  const RadialEigenpair rad = radial_eigenpair(sp.u, v_of_u, ep, 1e-13, ang.mu);
  rep.lambda1 = rad.lambda;
  rep.phi = rad.phi;

  Field w(sp.u.grid);
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) w(i, j) = rad.phi[i] * ang.eta[j];
  rep.second_variation = second_variation(sp.u, w, ones, ep);
  rep.second_variation_closed = second_variation_closed(sp.u, w, rad.lambda, ep);
  rep.rayleigh_quotient = rayleigh_bound_check(sp.u, sp.v, ep).quotient;
  return rep;
}

SymmetryVerdict symmetry_verdict(const SolutionPair& sp, const SpectralReport& report, double radial_tol) {
  SymmetryVerdict v;
  v.predicted = report.criterion_lhs > report.criterion_rhs;
  v.observed = sp.radiality > radial_tol;
  v.discrepancy = v.predicted && !v.observed;
  v.label = std::string(v.predicted ? "predicted" : "not-predicted") + "/" +
            (v.observed ? "observed" : "not-observed");
  return v;
}

}  // namespace hamsys
