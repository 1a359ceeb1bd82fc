// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hamsys/domain.hpp"
#include "hamsys/elliptic.hpp"
#include "hamsys/errors.hpp"
#include "hamsys/experiment.hpp"
#include "hamsys/functional.hpp"
#include "hamsys/solver.hpp"
#include "hamsys/spectral.hpp"

using namespace hamsys;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kMmsOrder = 1.9;
constexpr double kMmsSeconds = 30.0;
constexpr double kGradientRel = 1e-5;
constexpr double kAngularResidual = 1e-12;
constexpr double kHardyScale = 1e-8;
constexpr double kHardyCross = 1e-2;
constexpr double kHardySeconds = 120.0;
constexpr double kResidual = 1e-8;
constexpr double kCone = 1e-8;
constexpr double kExistenceSeconds = 300.0;
constexpr double kRoundoffFloor = 1e-12;  // comparison violation relative to max(q v^p, p u^q)
constexpr double kRayleighRel = 1e-3;
constexpr double kRadialTol = 1e-3;
constexpr double kArithmetic = 1e-15;
constexpr double kSweepSeconds = 900.0;
constexpr double kSzulkinSlack = -1e-8;
constexpr int kSzulkinTrials = 50;
constexpr double kSzulkinDelta = 1e-3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GridPtr make_grid(int N, int m, int n, int nr, int nt, double R = 1.0, double R_out = 10.0) {
  DomainSpec s;
  s.N = N;
  s.m = m;
  s.n = n;
  s.R = R;
  s.R_out = R_out;
  s.n_r = nr;
  s.n_theta = nt;
  return build_grid(s);
}

struct Solved {
  std::string label;
  SolutionPair sp;
  ExponentPair ep;
  WeightPair wp;
};

// every accepted pair produced during the run, for criteria 6, 7 and 10
std::vector<Solved> g_accepted;
std::map<std::string, std::size_t> g_index;

const Solved& solve_case(const std::string& label, int N, int m, int n, double p, double q, int nr, int nt) {
  if (auto it = g_index.find(label); it != g_index.end()) return g_accepted[it->second];
  const GridPtr g = make_grid(N, m, n, nr, nt);
  Solved s{label, {}, ExponentPair::make(p, q, N, n), make_weights("ones", g)};
  s.sp = mountain_pass_solve(s.wp, s.ep);
  if (!s.sp.accepted) throw NonConvergenceError(label + ": solve not accepted", s.sp.residual_u);
  g_index[label] = g_accepted.size();
  g_accepted.push_back(std::move(s));
  return g_accepted.back();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double comparison_eps(const Solved& s) {
  const ComparisonReport c = comparison_check(s.sp.u, s.sp.v, s.ep, 0.0);
  return std::max(0.0, -c.min_value) / std::max(1.0, c.scale);
}

Outcome c1_mms() {
  const int N = 5, m = 3, n = 2;
  auto exact = [](double r, double t) { return (r - 1.0) * (4.0 - r) * std::exp(-r) * std::cos(t) * std::cos(t); };
  auto rhs = [&](double r, double t) {
    const double e = std::exp(-r);
    const double f = (r - 1.0) * (4.0 - r) * e;
    const double fp = ((4.0 - r) - (r - 1.0) - (r - 1.0) * (4.0 - r)) * e;
    const double fpp = (-2.0 - 2.0 * ((4.0 - r) - (r - 1.0)) + (r - 1.0) * (4.0 - r)) * e;
    const double c2 = std::cos(t) * std::cos(t), s2 = std::sin(t) * std::sin(t);
    const double ang = -2.0 * std::cos(2 * t) + 2.0 * (m - 1) * s2 - 2.0 * (n - 1) * c2;
    return -((fpp + (N - 1) * fp / r) * c2 + f * ang / (r * r)) + f * c2;
  };
  std::vector<double> err, secs;
  for (int res : {33, 65, 129}) {
    const auto t0 = Clock::now();
    const GridPtr g = make_grid(N, m, n, res, res, 1.0, 4.0);
    const HelmholtzSystem sys(g);
    const Field u = helmholtz_solve(sys, Field::sample(g, rhs), 1e-12);
    const Field ue = Field::sample(g, exact);
    Field e(g);
    for (std::size_t k = 0; k < e.size(); ++k) e.values[k] = u.values[k] - ue.values[k];
    err.push_back(norm(e) / norm(ue));
    secs.push_back(seconds_since(t0));
  }
  const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
  return {std::min(o1, o2) >= kMmsOrder && secs[2] < kMmsSeconds,
          fmt("orders %.3f %.3f (>= %.1f), %.2f s at 129x129", o1, o2, kMmsOrder, secs[2])};
}

Outcome c2_gradient() {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const GridPtr g = make_grid(5, 3, 2, 33, 17);
  const HelmholtzSystem sys(g);
  const ReducedFunctional rf(sys, make_weights("s-squared", g), ExponentPair::make(3.0, 3.5, 5, 2));
  auto random = [&] {
    Field f(g);
    for (std::size_t i = 1; i + 1 < g->nr; ++i)
      for (std::size_t j = 0; j < g->nt; ++j) f(i, j) = U(rng);
    return f;
  };
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = random(), h = random();
    const double eps = 1e-5;
    Field up = u, um = u;
    for (std::size_t k = 0; k < u.size(); ++k) {
      up.values[k] += eps * h.values[k];
      um.values[k] -= eps * h.values[k];
    }
    const double fd = (rf.energy(up).value() - rf.energy(um).value()) / (2.0 * eps);
    const double an = inner(rf.gradient(u), h);
    worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(an), std::abs(fd)));
  }
  return {worst <= kGradientRel, fmt("max relative error %.2e over 20 pairs (<= %.0e)", worst, kGradientRel)};
}

Outcome c3_angular() {
  double worst = 0.0, worst_end = 0.0;
  for (int n = 2; n <= 8; ++n)
    for (int m = n; m <= 8; ++m) {
      const AngularCheck c = angular_eigen_check(m, n, 2001);
      worst = std::max(worst, c.residual);
      worst_end = std::max(worst_end, c.endpoint_derivative);
    }
  return {worst <= kAngularResidual && worst_end <= kAngularResidual,
          fmt("max residual %.2e, endpoint derivative %.2e (<= %.0e)", worst, worst_end, kAngularResidual)};
}

Outcome c4_hardy() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;
  for (int N : {4, 5, 6}) {
    DomainSpec s;
    s.N = N;
    s.m = N - 2;
    s.n = 2;
    const HardyReport a = hardy_constant(s);
    s.R = 3.0;
    s.R_out = 30.0;
    const HardyReport b = hardy_constant(s);
    const double scale = std::abs(a.estimate - b.estimate) / a.estimate;
    const bool bound = a.estimate >= a.lower_bound;
    ok = ok && bound && scale <= kHardyScale;
    os << "N=" << N << " " << fmt("%.6f", a.estimate) << (bound ? " >= " : " < ") << a.lower_bound
       << fmt(" R-drift %.1e; ", scale);
  }
  DomainSpec s;
  s.N = 5;
  s.m = 3;
  s.n = 2;
  s.n_r = 257;
  s.n_theta = 9;
  const double two_d = hardy_reduced_2d(s);
  const double one_d = hardy_radial_at(5, s.R_out / s.R);
  const double cross = std::abs(two_d - one_d) / one_d;
  const double secs = seconds_since(t0);
  ok = ok && cross <= kHardyCross && secs < kHardySeconds;
  os << fmt("2-D vs radial %.2e; %.1f s", cross, secs);
  return {ok, os.str()};
}

Outcome c5_existence() {
  const auto t0 = Clock::now();
  const ExponentPair ep = ExponentPair::make(3.2, 3.2, 5, 2);
  const Solved& s = solve_case("N5-3.2-129", 5, 3, 2, 3.2, 3.2, 129, 65);
  const double secs = seconds_since(t0);
  const SolutionPair& sp = s.sp;
  double umax = 0.0;
  for (double x : sp.u.values) umax = std::max(umax, std::abs(x));
  double vmax = 0.0;
  for (double x : sp.v.values) vmax = std::max(vmax, std::abs(x));
  const double cone_u = std::max(sp.cone_u.negativity, sp.cone_u.monotonicity) / std::max(1.0, umax);
  const double cone_v = std::max(sp.cone_v.negativity, sp.cone_v.monotonicity) / std::max(1.0, vmax);
  const bool ok = ep.window_ok && sp.residual_u <= kResidual && sp.residual_v <= kResidual && sp.energy > 0.0 &&
                  cone_u <= kCone && cone_v <= kCone && sp.positivity_margin > 0.0 && secs < kExistenceSeconds;
  return {ok, fmt("window %s, residuals %.1e %.1e, I(u) = %.4g, cone %.1e %.1e, min interior %.2e, %.1f s",
                  ep.window_ok ? "ok" : "violated", sp.residual_u, sp.residual_v, sp.energy, cone_u, cone_v,
                  sp.positivity_margin, secs)};
}

Outcome c6_comparison() {
  struct Level {
    const char* coarse;
    const char* fine;
    int N, m, n;
    double p, q;
    int nr, nt;
  };
  const std::vector<Level> levels = {{"N5-3.2-65", "N5-3.2-129", 5, 3, 2, 3.2, 3.2, 65, 33},
                                     {"N4-2.5-3-33", "N4-2.5-3-65", 4, 2, 2, 2.5, 3.0, 33, 17},
                                     {"N6-5.5-33", "N6-5.5-65", 6, 4, 2, 5.5, 5.5, 33, 17}};
  bool ok = true;
  std::ostringstream os;
  for (const Level& l : levels) {
    const double ec = comparison_eps(solve_case(l.coarse, l.N, l.m, l.n, l.p, l.q, l.nr, l.nt));
    const double ef = comparison_eps(solve_case(l.fine, l.N, l.m, l.n, l.p, l.q, 2 * l.nr - 1, 2 * l.nt - 1));
    const bool step = ef <= std::max(ec, kRoundoffFloor);
    ok = ok && step;
    os << l.fine << fmt(" eps %.1e -> %.1e; ", ec, ef);
  }
  double worst = 0.0;
  for (const Solved& s : g_accepted) worst = std::max(worst, comparison_eps(s));
  ok = ok && worst <= kRoundoffFloor;
  os << fmt("worst over %zu accepted pairs %.1e (floor %.0e)", g_accepted.size(), worst, kRoundoffFloor);
  return {ok, os.str()};
}

Outcome c7_rayleigh() {
  double worst = -1.0;
  bool ok = !g_accepted.empty();
  for (const Solved& s : g_accepted) {
    const RayleighReport ru = rayleigh_bound_check(s.sp.u, s.sp.v, s.ep, kRayleighRel);
    ok = ok && ru.pass;
    worst = std::max(worst, ru.quotient / ru.bound - 1.0);
  }
  return {ok, fmt("max quotient / bound - 1 = %.2e over %zu accepted pairs (<= %.0e)", worst, g_accepted.size(),
                  kRayleighRel)};
}

Outcome c8_symmetry() {
  const Solved& s = solve_case("N6-5.5-65", 6, 4, 2, 5.5, 5.5, 65, 33);
  const double hardy = hardy_constant(s.sp.u.grid->spec).estimate;
  const SpectralReport rep = spectral_report(s.sp, s.ep, hardy);
  const SymmetryVerdict v = symmetry_verdict(s.sp, rep, kRadialTol);
  const double lhs = (s.ep.p - 1.0) * (s.ep.q - 1.0);
  const double f = 1.0 + 2.0 * 6 / hardy;
  const double rhs = f * f * s.ep.q / s.ep.p;
  const bool arithmetic = rep.criterion_lhs == lhs && std::abs(rep.criterion_rhs - rhs) <= kArithmetic * rhs &&
                          rep.verdict == (rep.criterion_lhs > rep.criterion_rhs) &&
                          v.predicted == rep.verdict &&
                          symmetry_breaking_predicted(6, hardy, s.ep.p, s.ep.q) == rep.verdict;
  const bool ok = arithmetic && v.predicted && s.sp.radiality > kRadialTol;
  return {ok, fmt("(p-1)(q-1) = %.4f vs %.4f, verdict %s, radiality %.4f (> %.0e)", lhs, rhs, v.label.c_str(),
                  s.sp.radiality, kRadialTol)};
}

Outcome c9_sweep() {
  const auto t0 = Clock::now();
  DomainSpec base;
  base.N = 6;
  base.m = 4;
  base.n = 2;
  base.n_r = 65;
  base.n_theta = 33;
  const SweepResult res = multiplicity_sweep(base, 3.5, 3.5, 3, "ones", {}, 2);
  const double secs = seconds_since(t0);
  bool ok = res.entries.size() == 2 && secs < kSweepSeconds;
  std::ostringstream os;
  for (const SweepEntry& e : res.entries) {
    const bool conv = e.solution && e.solution->accepted;
    ok = ok && conv && e.solution->radiality > kRadialTol;
    os << "(" << e.m << "," << e.n << ") " << (conv ? fmt("radiality %.4f; ", e.solution->radiality) : "failed; ");
    if (conv) {
      const GridPtr g = e.solution->u.grid;
      Solved s{fmt("sweep-%d-%d", e.m, e.n), *e.solution, ExponentPair::make(3.5, 3.5, 6, e.n),
               make_weights("ones", g)};
      g_index[s.label] = g_accepted.size();
      g_accepted.push_back(std::move(s));
    }
  }
  ok = ok && res.distinctness.size() == 1 && res.distinctness[0].second.verdict == "distinct";
  if (!res.distinctness.empty())
    os << "verdict " << res.distinctness[0].second.verdict << fmt(" (distance %.3f); ", res.distinctness[0].second.distance);
  os << fmt("%.1f s", secs);
  return {ok, os.str()};
}

Outcome c10_szulkin() {
  double worst = std::numeric_limits<double>::infinity();
  bool ok = !g_accepted.empty();
  for (const Solved& s : g_accepted) {
    const auto dirs = cone_directions(s.sp.u, kSzulkinTrials, kSzulkinDelta, 12345);
    const SzulkinReport r = szulkin_check(s.sp.u, s.wp, s.ep, dirs, -kSzulkinSlack);
    worst = std::min(worst, r.min_slack);
    ok = ok && r.min_slack >= kSzulkinSlack;
  }
  return {ok, fmt("min slack %.2e over %d directions at %zu accepted pairs (>= %.0e)", worst, kSzulkinTrials,
                  g_accepted.size(), kSzulkinSlack)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Outcome c11_determinism() {
  const fs::path dir = fs::temp_directory_path() / "hamsys_acceptance_determinism";
  fs::remove_all(dir);
  const std::vector<std::string> ov = {"domain.N=4",        "domain.m=2",         "domain.n=2",
                                       "domain.n_r=65",     "domain.n_theta=33",  "exponents.p=2.5",
                                       "exponents.q=3",     "tasks.list=solve,spectrum,hardy",
                                       "output.dir=" + dir.string()};
  const auto cfg = experiment::parse_config("", ov);
  std::map<std::string, std::string> first;
  const auto r1 = experiment::run(cfg);
  for (const auto& p : r1.artifacts)
    if (p.extension() == ".json") first[p.filename().string()] = slurp(p);
  const auto r2 = experiment::run(cfg);
  bool same = !first.empty() && r1.exit_code == experiment::kOk && r2.exit_code == experiment::kOk;
  std::size_t count = 0;
  for (const auto& p : r2.artifacts)
    if (p.extension() == ".json") {
      ++count;
      same = same && first.count(p.filename().string()) && first[p.filename().string()] == slurp(p);
    }
  same = same && count == first.size();
  fs::remove_all(dir);
  return {same, fmt("%zu JSON reports compared, exit codes %d %d", count, r1.exit_code, r2.exit_code)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"manufactured-solution convergence", c1_mms},
      {"gradient consistency", c2_gradient},
      {"angular eigenpair identity", c3_angular},
      {"Hardy constant", c4_hardy},
      {"existence at N=5, p=q=3.2", c5_existence},
      {"pointwise comparison", c6_comparison},
      {"Rayleigh bound", c7_rayleigh},
      {"symmetry-breaking pipeline", c8_symmetry},
      {"multiplicity sweep N=6, k=3", c9_sweep},
      {"Szulkin criticality", c10_szulkin},
      {"determinism", c11_determinism},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2d  %-36s %s\n", o.pass ? "PASS" : "FAIL", k, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
