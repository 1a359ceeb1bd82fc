#include "hamsys/functional.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "hamsys/errors.hpp"

namespace hamsys {

ExponentPair ExponentPair::make(double p, double q, int N, int n) {
  if (!(p > 2.0) || !std::isfinite(p)) throw ValidationError("exponents: p > 2 violated");
  if (!(q >= p) || !std::isfinite(q)) throw ValidationError("exponents: q >= p violated");
  ExponentPair ep;
  ep.p = p;
  ep.q = q;
  ep.N = N;
  ep.n = n;
  ep.p_conj = p / (p - 1.0);
  ep.q_conj = q / (q - 1.0);
  const double s = 1.0 / p + 1.0 / q;
  ep.supercritical = s < 1.0 - 2.0 / N;
  ep.window_ok = n <= (p + 1.0) / (p - 1.0) || s > 1.0 - 2.0 / (n + 1.0);
  return ep;
}

namespace {

struct Table {
  std::vector<double> r, theta;
  std::vector<double> a, b;  // a[ir * ntheta + it]
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("weights: cannot open table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("weights: empty table '" + path + "'");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "r,theta,a,b") throw ValidationError("weights: table header must be r,theta,a,b");
  std::map<std::pair<double, double>, std::pair<double, double>> rows;
  std::vector<double> rs, ts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double r, t, a, b;
    if (!(ls >> r >> t >> a >> b))
      throw ValidationError("weights: malformed row " + std::to_string(lineno) + " in " + path);
    rows[{r, t}] = {a, b};
    rs.push_back(r);
    ts.push_back(t);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(rs);
  uniq(ts);
  if (rs.empty() || ts.empty() || rows.size() != rs.size() * ts.size())
    throw ValidationError("weights: table '" + path + "' is not a full tensor grid");
  Table tab{rs, ts, {}, {}};
  for (double r : rs)
    for (double t : ts) {
      const auto& ab = rows.at({r, t});
      tab.a.push_back(ab.first);
      tab.b.push_back(ab.second);
    }
  return tab;
}

// Position of x in the sorted axis as (index, fraction), clamped.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
  if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - axis.begin()) - 1;
  return {k, (x - axis[k]) / (axis[k + 1] - axis[k])};
}

double bilinear(const Table& tab, const std::vector<double>& vals, double r, double t) {
  const std::size_t nt = tab.theta.size();
  auto [ir, fr] = locate(tab.r, r);
  auto [it, ft] = locate(tab.theta, t);
  auto at = [&](std::size_t i, std::size_t j) {
    i = std::min(i, tab.r.size() - 1);
    j = std::min(j, nt - 1);
    return vals[i * nt + j];
  };
  return (1 - fr) * ((1 - ft) * at(ir, it) + ft * at(ir, it + 1)) +
         fr * ((1 - ft) * at(ir + 1, it) + ft * at(ir + 1, it + 1));
}

double field_min(const Field& f) { return *std::min_element(f.values.begin(), f.values.end()); }
double field_max(const Field& f) { return *std::max_element(f.values.begin(), f.values.end()); }

}  // namespace

WeightPair make_weights(const std::string& preset, const GridPtr& grid) {
  WeightPair wp;
  wp.name = preset;
  if (preset == "ones") {
    wp.a = Field(grid, 1.0);
    wp.b = Field(grid, 1.0);
  } else if (preset == "s-squared") {
    auto f = [](double r, double t) {
      const double s = r * std::cos(t);
      return 1.0 + s * s;
    };
    wp.a = Field::sample(grid, f);
    wp.b = Field::sample(grid, f);
  } else {
    const Table tab = read_table(preset);
    wp.a = Field::sample(grid, [&](double r, double t) { return bilinear(tab, tab.a, r, t); });
    wp.b = Field::sample(grid, [&](double r, double t) { return bilinear(tab, tab.b, r, t); });
  }
  wp.a0 = field_min(wp.a);
  wp.b0 = field_min(wp.b);
  if (!(wp.a0 > 0.0) || !(wp.b0 > 0.0) || !wp.a.all_finite() || !wp.b.all_finite())
    throw ValidationError("weights: a and b must be finite and bounded below by a positive constant");
  return wp;
}

WeightReport validate_weights(const WeightPair& wp, double tol) {
  require_same_grid(wp.a, wp.b);
  const Grid& g = *wp.a.grid;
  WeightReport rep;
  rep.min_a = field_min(wp.a);
  rep.min_b = field_min(wp.b);
  rep.max_a = field_max(wp.a);
  rep.max_b = field_max(wp.b);
  rep.worst_a_theta = -std::numeric_limits<double>::infinity();
  rep.worst_b_theta = rep.worst_a_theta;
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j + 1 < g.nt; ++j) {
      rep.worst_a_theta = std::max(rep.worst_a_theta, (wp.a(i, j + 1) - wp.a(i, j)) / g.h_theta);
      rep.worst_b_theta = std::max(rep.worst_b_theta, (wp.b(i, j + 1) - wp.b(i, j)) / g.h_theta);
    }
  std::ostringstream msg;
  if (!(rep.min_a > 0.0) || !(rep.min_b > 0.0)) {
    rep.pass = false;
    msg << "weights not bounded below by a positive constant; ";
  }
  if (!std::isfinite(rep.max_a) || !std::isfinite(rep.max_b)) {
    rep.pass = false;
    msg << "weights not bounded above; ";
  }
  if (rep.worst_a_theta > tol) {
    rep.pass = false;
    msg << "a increases in theta (s a_t - t a_s = " << rep.worst_a_theta << "); ";
  }
  if (rep.worst_b_theta > tol) {
    rep.pass = false;
    msg << "b increases in theta (s b_t - t b_s = " << rep.worst_b_theta << "); ";
  }
  rep.message = rep.pass ? "ok" : msg.str();
  return rep;
}

ReducedFunctional::ReducedFunctional(const HelmholtzSystem& sys, WeightPair wp, ExponentPair ep)
    : sys_(&sys), wp_(std::move(wp)), ep_(ep) {
  require_same_grid(wp_.a, wp_.b);
  if (wp_.a.values.size() != sys.grid()->size())
    throw GridMismatchError("weights do not match the operator grid");
  alpha_.resize(wp_.a.size());
  for (std::size_t k = 0; k < alpha_.size(); ++k)
    alpha_[k] = std::pow(wp_.a.values[k], -(ep_.p_conj - 1.0));
}

Field ReducedFunctional::inversion_map(const Field& u) const {
  Field x = sys_->apply_interior(u);
  const double e = ep_.p_conj - 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) x.values[k] = std::pow(std::abs(x.values[k]), e) * alpha_[k];
  return x;
}

double ReducedFunctional::psi(const Field& u) const {
  const Field x = sys_->apply_interior(u);
  const auto& w = x.grid->weights;
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    acc += w[k] * std::pow(std::abs(x.values[k]), ep_.p_conj) * alpha_[k];
  return acc / ep_.p_conj;
}

EnergyTerms ReducedFunctional::energy(const Field& u) const {
  const Grid& g = *sys_->grid();
  EnergyTerms e;
  e.psi = psi(u);
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      acc += g.weights[k] * wp_.b.values[k] * std::pow(std::abs(u.values[k]), ep_.q);
    }
  e.phi = acc / ep_.q;
  return e;
}

Field ReducedFunctional::phi_gradient(const Field& u) const {
  const Grid& g = *sys_->grid();
  Field out(sys_->grid());
  for (std::size_t i = 1; i + 1 < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) {
      const std::size_t k = g.index(i, j);
      const double x = u.values[k];
      out.values[k] = wp_.b.values[k] * std::pow(std::abs(x), ep_.q - 2.0) * x;
    }
  return out;
}

Field ReducedFunctional::gradient(const Field& u) const {
  Field z = sys_->apply_interior(u);
  const double e = 0.5 * (ep_.p_conj - 2.0);
  const double eps2 = kGradientEps * kGradientEps;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double x = z.values[k];
    z.values[k] = alpha_[k] * std::pow(x * x + eps2, e) * x;
  }
  Field g = sys_->apply_interior(z);
  const Field dphi = phi_gradient(u);
  for (std::size_t k = 0; k < g.size(); ++k) g.values[k] -= dphi.values[k];
  return g;
}

double ReducedFunctional::nehari_scale(const Field& u) const {
  const EnergyTerms e = energy(u);
  const double P = ep_.p_conj * e.psi;
  const double Q = ep_.q * e.phi;
  if (!(Q > 0.0)) throw DegenerateDirectionError("nehari_scale: Phi(u) = 0");
  if (!(P > 0.0)) throw DegenerateDirectionError("nehari_scale: Psi(u) = 0");
  return std::pow(P / Q, 1.0 / (ep_.q - ep_.p_conj));
}

SzulkinReport ReducedFunctional::szulkin_check(const Field& u, const std::vector<Field>& trials,
                                               double tol) const {
  SzulkinReport rep;
  const Field dphi = phi_gradient(u);
  const double psi_u = psi(u);
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (const Field& v : trials) {
    require_same_grid(u, v);
    Field diff(u.grid);
    for (std::size_t k = 0; k < diff.size(); ++k) diff.values[k] = u.values[k] - v.values[k];
    const double slack = inner(dphi, diff) + psi(v) - psi_u;
    rep.min_slack = std::min(rep.min_slack, slack);
    ++rep.trials;
  }
  if (rep.trials == 0) rep.min_slack = 0.0;
  rep.pass = rep.min_slack >= -tol;
  return rep;
}

Field inversion_map(const Field& u, const WeightPair& wp, const ExponentPair& ep) {
  const HelmholtzSystem sys(u.grid);
  return ReducedFunctional(sys, wp, ep).inversion_map(u);
}

EnergyTerms energy(const Field& u, const WeightPair& wp, const ExponentPair& ep) {
  const HelmholtzSystem sys(u.grid);
  return ReducedFunctional(sys, wp, ep).energy(u);
}

Field energy_gradient(const Field& u, const WeightPair& wp, const ExponentPair& ep) {
  const HelmholtzSystem sys(u.grid);
  return ReducedFunctional(sys, wp, ep).gradient(u);
}

double nehari_scale(const Field& u, const WeightPair& wp, const ExponentPair& ep) {
  const HelmholtzSystem sys(u.grid);
  return ReducedFunctional(sys, wp, ep).nehari_scale(u);
}

SzulkinReport szulkin_check(const Field& u, const WeightPair& wp, const ExponentPair& ep,
                            const std::vector<Field>& trials, double tol) {
  const HelmholtzSystem sys(u.grid);
  return ReducedFunctional(sys, wp, ep).szulkin_check(u, trials, tol);
}

std::vector<Field> cone_directions(const Field& u, std::size_t count, double delta,
                                   std::uint64_t seed) {
  const Grid& g = *u.grid;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xi(-1.0, 1.0);
  double umax = 0.0;
  for (double x : u.values) umax = std::max(umax, std::abs(x));
  const double scale = delta * (umax > 0.0 ? umax : 1.0);
  std::vector<Field> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    Field v = u;
    for (std::size_t i = 1; i + 1 < g.nr; ++i)
      for (std::size_t j = 0; j < g.nt; ++j) v(i, j) += scale * xi(rng);
    for (std::size_t j = 0; j < g.nt; ++j) {
      v(0, j) = 0.0;
      v(g.nr - 1, j) = 0.0;
    }
    out.push_back(cone_project(v));
  }
  return out;
}

}  // namespace hamsys
