#include "hamsys/solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hamsys/errors.hpp"

namespace hamsys {

namespace {

double max_abs(const Field& u) {
  double m = 0.0;
  for (double x : u.values) m = std::max(m, std::abs(x));
  return m;
}

void zero_boundary(Field& u) {
  const Grid& g = *u.grid;
  for (std::size_t j = 0; j < g.nt; ++j) {
    u(0, j) = 0.0;
    u(g.nr - 1, j) = 0.0;
  }
}

Field scaled(const Field& u, double t) {
  Field out = u;
  for (double& x : out.values) x *= t;
  return out;
}

Field difference(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] -= b.values[k];
  return out;
}

double relative_distance(const Field& a, const Field& b) {
  const double nb = norm(b);
  const double d = norm(difference(a, b));
  return nb > 0.0 ? d / nb : d;
}

// P = p' Psi and Q = q Phi, so that I(t u) = t^{p'} P / p' - t^q Q / q.
struct RayTerms {
  double P = 0.0;
  double Q = 0.0;
};

RayTerms ray_terms(const ReducedFunctional& rf, const Field& u) {
  const EnergyTerms e = rf.energy(u);
  return {rf.exponents().p_conj * e.psi, rf.exponents().q * e.phi};
}

double ray_energy(const ExponentPair& ep, const RayTerms& rt, double t) {
  return std::pow(t, ep.p_conj) * rt.P / ep.p_conj - std::pow(t, ep.q) * rt.Q / ep.q;
}

struct PathPoint {
  Field z;      // on the ray maximum: I(z) = max_t I(t z)
  double J = 0.0;
  double path_max = 0.0;
};

// Normalizes z onto its ray maximum and evaluates the discretized path from 0
// to e = 2 t* z (doubled while I(e) > 0).
PathPoint make_path(const ReducedFunctional& rf, const Field& z, int points) {
  const ExponentPair& ep = rf.exponents();
  const RayTerms rt = ray_terms(rf, z);
  if (!(rt.Q > 0.0) || !(rt.P > 0.0)) throw NoSolutionError("mountain pass: path collapsed to 0", 0.0);
  const double t_star = std::pow(rt.P / rt.Q, 1.0 / (ep.q - ep.p_conj));
  double t_end = 2.0 * t_star;
  while (ray_energy(ep, rt, t_end) > 0.0) t_end *= 2.0;
  double pmax = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = t_end * static_cast<double>(k) / static_cast<double>(points - 1);
    pmax = std::max(pmax, ray_energy(ep, rt, t));
  }
  PathPoint pp;
  pp.z = scaled(z, t_star);
  pp.J = ray_energy(ep, rt, t_star);
  pp.path_max = pmax;
  return pp;
}

// Psi-Hessian preconditioned gradient of I at z: (A D A)^{-1} G with
// D = (p'-1) a^{1-p'} |Az|^{p'-2}.
Field mp_direction(const ReducedFunctional& rf, const Field& z, double cg_tol) {
  const HelmholtzSystem& sys = rf.system();
  const ExponentPair& ep = rf.exponents();
  const Field x = sys.apply_interior(z);
  const Field y = helmholtz_solve(sys, rf.phi_gradient(z), cg_tol);
  Field t(z.grid);
  const double pc = ep.p_conj;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double dinv =
        std::pow(std::abs(x.values[k]), 2.0 - pc) * std::pow(rf.weights().a.values[k], pc - 1.0) / (pc - 1.0);
    t.values[k] = dinv * y.values[k];
  }
  const Field w = helmholtz_solve(sys, t, cg_tol);
  Field d(z.grid);
  for (std::size_t k = 0; k < d.size(); ++k) d.values[k] = z.values[k] / (pc - 1.0) - w.values[k];
  zero_boundary(d);
  return d;
}

struct MpOutcome {
  PathPoint point;
  int iterations = 0;
  double rel_direction = 0.0;
};

void radialize(Field& u) {
  const auto avg = radial_average(u);
  const Grid& g = *u.grid;
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) u(i, j) = avg[i];
}

Field admissible(const Field& u, bool radial_only) {
  Field out = cone_project(u);
  if (radial_only) radialize(out);
  zero_boundary(out);
  return out;
}

MpOutcome descend(const ReducedFunctional& rf, const Field& start, const SolverOptions& opts) {
  const Field z0 = admissible(start, opts.radial_only);
  MpOutcome out;
  out.point = make_path(rf, z0, opts.path_points);
  for (int it = 0; it < opts.mp_max_iter; ++it) {
    const Field& z = out.point.z;
    const Field d = mp_direction(rf, z, opts.cg_tol);
    const Field G = rf.gradient(z);
    out.rel_direction = norm(d) / (norm(z) / (rf.exponents().p_conj - 1.0));
    if (out.rel_direction <= opts.mp_grad_tol) break;
    double s = 1.0;
    bool moved = false;
    while (s > 1e-10) {
      Field trial = z;
      for (std::size_t k = 0; k < trial.size(); ++k) trial.values[k] -= s * d.values[k];
      trial = admissible(trial, opts.radial_only);
      const double decrease = inner(G, difference(z, trial));
      if (max_abs(trial) > 0.0) {
        try {
          PathPoint cand = make_path(rf, trial, opts.path_points);
          if (cand.J <= out.point.J - 1e-4 * std::max(decrease, 0.0) && cand.J < out.point.J) {
            out.point = std::move(cand);
            moved = true;
            break;
          }
        } catch (const NoSolutionError&) {
        }
      }
      s *= 0.5;
    }
    out.iterations = it + 1;
    if (!moved) break;
  }
  return out;
}

std::vector<std::size_t> interior_nodes(const Grid& g) {
  std::vector<std::size_t> idx;
  idx.reserve((g.nr - 2) * g.nt);
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) idx.push_back(g.index(i, j));
  return idx;
}

double odd_pow(double x, double e) { return std::pow(std::abs(x), e - 1.0) * x; }

struct CoupledResidual {
  Field f1, f2;  // Au - a|v|^{p-2}v, Av - b|u|^{q-2}u on interior rows
  double n1 = 0.0, n2 = 0.0;
  double s1 = 0.0, s2 = 0.0;  // ||a|v|^{p-1}||, ||b|u|^{q-1}||
  double rel_u() const { return s1 > 0.0 ? n1 / s1 : n1; }
  double rel_v() const { return s2 > 0.0 ? n2 / s2 : n2; }
};

CoupledResidual coupled_residual(const ReducedFunctional& rf, const Field& u, const Field& v) {
  const HelmholtzSystem& sys = rf.system();
  const ExponentPair& ep = rf.exponents();
  const WeightPair& wp = rf.weights();
  const Grid& g = *sys.grid();
  CoupledResidual r;
  r.f1 = sys.apply_interior(u);
  r.f2 = sys.apply_interior(v);
  Field src1(u.grid), src2(u.grid);
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      src1.values[k] = wp.a.values[k] * odd_pow(v.values[k], ep.p - 1.0);
      src2.values[k] = wp.b.values[k] * odd_pow(u.values[k], ep.q - 1.0);
      r.f1.values[k] -= src1.values[k];
      r.f2.values[k] -= src2.values[k];
    }
  r.n1 = norm(r.f1);
  r.n2 = norm(r.f2);
  r.s1 = norm(src1);
  r.s2 = norm(src2);
  return r;
}

void check_inputs(const WeightPair& wp, const ExponentPair& ep, const SolverOptions& opts,
                  std::vector<std::string>& warnings) {
  const DomainSpec& spec = wp.a.grid->spec;
  if (ep.N != spec.N || ep.n != spec.n)
    throw ValidationError("exponent pair was built for a different (N, n) than the grid");
  const WeightReport wr = validate_weights(wp, 1e-12);
  if (!wr.pass) throw ValidationError("weights violate hypothesis (H): " + wr.message);
  if (!ep.window_ok) {
    std::ostringstream os;
    os << "exponents (p, q) = (" << ep.p << ", " << ep.q << ") lie outside the existence window for n = "
       << ep.n;
    if (!opts.allow_outside_window) throw ValidationError(os.str());
    warnings.push_back(os.str() + "; run allowed");
  }
}

}  // namespace

Field seed_profile(const GridPtr& grid, const std::string& name) {
  const double R = grid->spec.R, Ro = grid->spec.R_out;
  int power = 0;
  if (name != "radial") {
    if (name.rfind("cos", 0) != 0 || name.size() == 3)
      throw ValidationError("unknown seed profile '" + name + "'");
    try {
      power = std::stoi(name.substr(3));
    } catch (const std::exception&) {
      throw ValidationError("unknown seed profile '" + name + "'");
    }
    if (power < 0) throw ValidationError("unknown seed profile '" + name + "'");
  }
  return Field::sample(grid, [=](double r, double t) {
    return (r - R) * std::exp(-(r - R)) * (Ro - r) / (Ro - R) * std::pow(std::cos(t), power);
  });
}

std::vector<double> radial_average(const Field& u) {
  const Grid& g = *u.grid;
  double vol = 0.0;
  for (double x : g.angular_volume) vol += x;
  std::vector<double> avg(g.nr, 0.0);
  for (std::size_t i = 0; i < g.nr; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.nt; ++j) acc += g.angular_volume[j] * u(i, j);
    avg[i] = acc / vol;
  }
  return avg;
}

double radiality_measure(const Field& u) {
  const double nu = norm(u);
  if (!(nu > 0.0)) throw DegenerateDirectionError("radiality_measure is undefined for u = 0");
  const auto avg = radial_average(u);
  Field d = u;
  const Grid& g = *u.grid;
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) d(i, j) -= avg[i];
  return norm(d) / nu;
}

void evaluate_pair(SolutionPair& sp, const ReducedFunctional& rf, const SolverOptions& opts) {
  const Grid& g = *sp.u.grid;
  const ExponentPair& ep = rf.exponents();
  sp.m = g.spec.m;
  sp.n = g.spec.n;
  sp.p = ep.p;
  sp.q = ep.q;
  const CoupledResidual cr = coupled_residual(rf, sp.u, sp.v);
  sp.residual_u = cr.rel_u();
  sp.residual_v = cr.rel_v();
  const EnergyTerms e = rf.energy(sp.u);
  sp.energy = e.value();
  sp.psi = e.psi;
  sp.phi = e.phi;
  const double tol = opts.accept_tol;
  sp.cone_u = cone_membership(sp.u, tol * std::max(1.0, max_abs(sp.u)));
  sp.cone_v = cone_membership(sp.v, tol * std::max(1.0, max_abs(sp.v)));
  sp.positivity_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j)
      sp.positivity_margin = std::min({sp.positivity_margin, sp.u(i, j), sp.v(i, j)});
  const Field inv_u = rf.inversion_map(sp.u);
  sp.roundtrip_error = relative_distance(inv_u, sp.v);
  Field back(sp.u.grid);
  for (std::size_t k = 0; k < back.size(); ++k)
    back.values[k] = rf.weights().a.values[k] * std::pow(inv_u.values[k], ep.p - 1.0);
  sp.roundtrip_u_error = relative_distance(helmholtz_solve(rf.system(), back, 1e-2 * opts.cg_tol), sp.u);
  const InvarianceResult inv = pointwise_invariance_step(rf.system(), sp.u, rf.weights().b, ep.q, opts.cg_tol);
  sp.invariance_error = relative_distance(inv.v, sp.v);
  sp.radiality = norm(sp.u) > 0.0 ? radiality_measure(sp.u) : 0.0;
  sp.accepted = std::isfinite(sp.residual_u) && std::isfinite(sp.residual_v) && sp.residual_u <= tol &&
                sp.residual_v <= tol && sp.cone_u.member && sp.cone_v.member && sp.energy > 0.0 &&
                sp.positivity_margin > 0.0 && sp.roundtrip_u_error <= 10.0 * tol;
}

SolutionPair coupled_refine(const SolutionPair& seed, const WeightPair& wp, const ExponentPair& ep,
                            const SolverOptions& opts) {
  require_same_grid(seed.u, seed.v);
  require_same_grid(seed.u, wp.a);
  if (!seed.u.all_finite() || !seed.v.all_finite())
    throw ValidationError("coupled_refine: seed is not finite");
  const GridPtr grid = seed.u.grid;
  const Grid& g = *grid;
  const HelmholtzSystem sys(grid);
  const ReducedFunctional rf(sys, wp, ep);
  const auto nodes = interior_nodes(g);
  const auto ni = static_cast<Eigen::Index>(nodes.size());
  const Eigen::SparseMatrix<double> A = sys.interior_matrix();

  SolutionPair sp = seed;
  zero_boundary(sp.u);
  zero_boundary(sp.v);
  sp.newton_history.clear();

  CoupledResidual cr = coupled_residual(rf, sp.u, sp.v);
  const double sc1 = cr.s1 > 0.0 ? cr.s1 : 1.0;
  const double sc2 = cr.s2 > 0.0 ? cr.s2 : 1.0;
  auto merit = [&](const CoupledResidual& c) {
    return (c.n1 / sc1) * (c.n1 / sc1) + (c.n2 / sc2) * (c.n2 / sc2);
  };
  const double target = 1e-3 * opts.accept_tol;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  int it = 0;
  for (; it < opts.newton_max_iter; ++it) {
    if (std::max(cr.rel_u(), cr.rel_v()) <= target) break;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(2 * A.nonZeros() + 2 * ni));
    for (int c = 0; c < A.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator itA(A, c); itA; ++itA) {
        trip.emplace_back(itA.row(), itA.col(), itA.value());
        trip.emplace_back(itA.row() + ni, itA.col() + ni, itA.value());
      }
    Eigen::VectorXd rhs(2 * ni);
    for (Eigen::Index k = 0; k < ni; ++k) {
      const std::size_t node = nodes[static_cast<std::size_t>(k)];
      const double vv = sp.v.values[node], uu = sp.u.values[node];
      trip.emplace_back(k, k + ni, -(ep.p - 1.0) * wp.a.values[node] * std::pow(std::abs(vv), ep.p - 2.0));
      trip.emplace_back(k + ni, k, -(ep.q - 1.0) * wp.b.values[node] * std::pow(std::abs(uu), ep.q - 2.0));
      rhs[k] = -cr.f1.values[node];
      rhs[k + ni] = -cr.f2.values[node];
    }
    Eigen::SparseMatrix<double> J(2 * ni, 2 * ni);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw NonConvergenceError("coupled_refine: Jacobian factorization failed",
                                std::max(cr.rel_u(), cr.rel_v()));
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite())
      throw NonConvergenceError("coupled_refine: Jacobian solve failed", std::max(cr.rel_u(), cr.rel_v()));

    const double m0 = merit(cr);
    double s = 1.0;
    bool accepted = false;
    while (s >= 1.0 / 1024.0) {
      Field u_try = sp.u, v_try = sp.v;
      for (Eigen::Index k = 0; k < ni; ++k) {
        const std::size_t node = nodes[static_cast<std::size_t>(k)];
        u_try.values[node] += s * delta[k];
        v_try.values[node] += s * delta[k + ni];
      }
      CoupledResidual c_try = coupled_residual(rf, u_try, v_try);
      if (merit(c_try) <= (1.0 - 1e-4 * s) * m0) {
        sp.u = std::move(u_try);
        sp.v = std::move(v_try);
        cr = std::move(c_try);
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
    sp.newton_history.push_back(std::max(cr.rel_u(), cr.rel_v()));
  }
  sp.newton_iterations = it;
  evaluate_pair(sp, rf, opts);
  if (!(sp.residual_u <= opts.accept_tol && sp.residual_v <= opts.accept_tol))
    throw NonConvergenceError("coupled_refine: residual above accept_tol",
                              std::max(sp.residual_u, sp.residual_v));
  return sp;
}

SolutionPair mountain_pass_solve(const WeightPair& wp, const ExponentPair& ep, const SolverOptions& opts) {
  std::vector<std::string> warnings;
  check_inputs(wp, ep, opts, warnings);
  const GridPtr grid = wp.a.grid;
  const HelmholtzSystem sys(grid);
  const ReducedFunctional rf(sys, wp, ep);
  if (opts.seed_profiles.empty()) throw ValidationError("no seed profiles configured");
  if (opts.path_points < 3) throw ValidationError("path_points must be at least 3");

  std::optional<SolutionPair> best;
  std::optional<SolutionPair> fallback;
  std::vector<Candidate> candidates;
  std::string collapse;
  for (const std::string& profile : opts.seed_profiles) {
    Candidate cand;
    cand.profile = profile;
    MpOutcome mp;
    try {
      mp = descend(rf, seed_profile(grid, profile), opts);
    } catch (const NoSolutionError& e) {
      cand.note = e.what();
      collapse = e.what();
      candidates.push_back(cand);
      continue;
    }
    cand.iterations = mp.iterations;
    cand.path_max = mp.point.path_max;
    SolutionPair sp;
    sp.u = mp.point.z;
    sp.v = rf.inversion_map(sp.u);
    sp.seed_profile = profile;
    sp.mp_iterations = mp.iterations;
    try {
      sp = coupled_refine(sp, wp, ep, opts);
    } catch (const NonConvergenceError& e) {
      evaluate_pair(sp, rf, opts);
      cand.note = std::string("newton: ") + e.what();
    }
    cand.energy = sp.energy;
    cand.radiality = sp.radiality;
    cand.accepted = sp.accepted;
    if (!sp.accepted && cand.note.empty()) cand.note = "rejected by acceptance checks";
    candidates.push_back(cand);
    auto& slot = sp.accepted ? best : fallback;
    if (!slot || sp.energy < slot->energy) slot = std::move(sp);
  }
  if (!best && !fallback) throw NoSolutionError("mountain pass: every seed collapsed to 0 (" + collapse + ")", 0.0);
  SolutionPair out = best ? std::move(*best) : std::move(*fallback);
  out.candidates = std::move(candidates);
  out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
  if (!out.accepted) out.warnings.push_back("no candidate met the acceptance checks; best iterate reported");
  return out;
}

SolutionPair continuation_solve(const WeightPair& wp, const ExponentPair& target, int steps,
                                const SolverOptions& opts) {
  if (steps < 1) throw ValidationError("continuation needs at least one step");
  std::vector<std::string> warnings;
  check_inputs(wp, target, opts, warnings);
  const int N = target.N;
  const double c0 = 0.5 * (2.0 + 2.0 * N / (N - 2.0));
  const double p0 = std::min(target.p, c0);
  const double q0 = std::min(target.q, c0);
  SolverOptions start_opts = opts;
  start_opts.allow_outside_window = true;
  SolutionPair cur = mountain_pass_solve(wp, ExponentPair::make(p0, q0, N, target.n), start_opts);
  if (!cur.accepted) throw NonConvergenceError("continuation: starting solve failed",
                                               std::max(cur.residual_u, cur.residual_v));
  const std::vector<Candidate> start_candidates = cur.candidates;
  const HelmholtzSystem sys(wp.a.grid);

  double lam = 0.0;
  double dlam = 1.0 / steps;
  const double min_step = 1.0 / (64.0 * steps);
  while (lam < 1.0) {
    const double next = std::min(1.0, lam + dlam);
    const ExponentPair ep =
        ExponentPair::make(p0 + next * (target.p - p0), q0 + next * (target.q - q0), N, target.n);
    const ReducedFunctional rf(sys, wp, ep);
    std::optional<SolutionPair> got;
    try {
      got = coupled_refine(cur, wp, ep, opts);
    } catch (const NonConvergenceError&) {
      try {
        SolutionPair reseed;
        reseed.u = scaled(cur.u, rf.nehari_scale(cur.u));
        reseed.v = rf.inversion_map(reseed.u);
        got = coupled_refine(reseed, wp, ep, opts);
      } catch (const Error&) {
      }
    }
    if (got && got->accepted) {
      cur = std::move(*got);
      lam = next;
      continue;
    }
    dlam *= 0.5;
    if (dlam < min_step) {
      std::ostringstream os;
      os << "continuation step underflow; last converged exponents (p, q) = (" << cur.p << ", " << cur.q << ")";
      cur.warnings.push_back(os.str());
      cur.accepted = false;
      break;
    }
  }
  cur.candidates = start_candidates;
  cur.warnings.insert(cur.warnings.begin(), warnings.begin(), warnings.end());
  return cur;
}

namespace {

double interp_theta(const Field& u, std::size_t i, double theta) {
  const Grid& g = *u.grid;
  const double x = std::clamp(theta / g.h_theta, 0.0, static_cast<double>(g.nt - 1));
  const auto j = std::min(static_cast<std::size_t>(x), g.nt - 2);
  const double f = x - static_cast<double>(j);
  return (1.0 - f) * u(i, j) + f * u(i, j + 1);
}

double slice_theta(int m, int N, int a, int b, double phi) {
  double s2 = 0.0, t2 = 0.0;
  const double xa = std::cos(phi), xb = std::sin(phi);
  (a <= m ? s2 : t2) += xa * xa;
  (b <= m ? s2 : t2) += xb * xb;
  (void)N;
  return std::atan2(std::sqrt(t2), std::sqrt(s2));
}

}  // namespace

DistinctnessResult distinctness_check(const SolutionPair& s1, const SolutionPair& s2, double tol) {
  const Grid& g1 = *s1.u.grid;
  const Grid& g2 = *s2.u.grid;
  if (g1.spec.N != g2.spec.N || g1.nr != g2.nr || g1.spec.R != g2.spec.R || g1.spec.R_out != g2.spec.R_out)
    throw GridMismatchError("distinctness_check: solutions live on incompatible radial grids");
  const int N = g1.spec.N;
  const int m1 = g1.spec.m, m2 = g2.spec.m;
  const int k = std::max(m1, m2);
  const std::vector<std::pair<int, int>> planes = {{1, N}, {1, k}, {k, N}};
  const std::size_t nphi = 4 * (std::max(g1.nt, g2.nt) - 1) + 1;
  const double dphi = 0.5 * 3.14159265358979323846 / static_cast<double>(nphi - 1);

  double dist2 = 0.0, n1 = 0.0, n2 = 0.0;
  for (const auto& [a, b] : planes) {
    for (std::size_t i = 0; i < g1.nr; ++i) {
      const double wr = std::pow(g1.r[i], N - 1) * g1.h_r;
      for (std::size_t c = 0; c < nphi; ++c) {
        const double phi = dphi * static_cast<double>(c);
        const double w = wr * dphi * ((c == 0 || c + 1 == nphi) ? 0.5 : 1.0);
        const double x1 = interp_theta(s1.u, i, slice_theta(m1, N, a, b, phi));
        const double x2 = interp_theta(s2.u, i, slice_theta(m2, N, a, b, phi));
        dist2 += w * (x1 - x2) * (x1 - x2);
        n1 += w * x1 * x1;
        n2 += w * x2 * x2;
      }
    }
  }
  DistinctnessResult res;
  const double scale = std::sqrt(std::max(n1, n2));
  res.distance = scale > 0.0 ? std::sqrt(dist2) / scale : 0.0;
  res.radiality_1 = radiality_measure(s1.u);
  res.radiality_2 = radiality_measure(s2.u);
  const bool rad1 = res.radiality_1 <= tol, rad2 = res.radiality_2 <= tol;
  if (res.distance > tol || rad1 != rad2)
    res.verdict = "distinct";
  else if (rad1 && rad2)
    res.verdict = "radial-coincidence";
  else
    res.verdict = "inconclusive";
  return res;
}

}  // namespace hamsys
