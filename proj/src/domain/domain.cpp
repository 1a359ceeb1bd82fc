#include "hamsys/domain.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hamsys/errors.hpp"

namespace hamsys {

namespace {

double rho(double theta, int m, int n) {
  return std::pow(std::cos(theta), m - 1) * std::pow(std::sin(theta), n - 1);
}

[[noreturn]] void invalid(const std::string& msg) { throw ValidationError("invalid domain: " + msg); }

}  // namespace

void DomainSpec::validate() const {
  if (m + n != N) invalid("N = m + n violated");
  if (n <= 1) invalid("n > 1 violated");
  if (n > m) invalid("n <= m violated");
  if (N <= 3) invalid("N > 3 violated");
  if (!(R > 0.0) || !std::isfinite(R)) invalid("inner radius R > 0 violated");
  if (!(R_out > R) || !std::isfinite(R_out)) invalid("R_out > R violated");
  if (n_r < 3) invalid("n_r >= 3 violated");
  if (n_theta < 3) invalid("n_theta >= 3 violated");
}

double sphere_area(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

kernels::RowStencil Grid::row_stencil(std::size_t i) const {
  kernels::RowStencil st;
  st.c_in = i > 0 ? radial_flux[i - 1] / radial_volume[i] : 0.0;
  st.c_out = i + 1 < nr ? radial_flux[i] / radial_volume[i] : 0.0;
  st.s = 1.0 / (r[i] * r[i]);
  return st;
}

GridPtr build_grid(const DomainSpec& spec) {
  spec.validate();
  auto g = std::make_shared<Grid>();
  g->spec = spec;
  g->nr = static_cast<std::size_t>(spec.n_r);
  g->nt = static_cast<std::size_t>(spec.n_theta);
  const std::size_t nr = g->nr, nt = g->nt;
  const int N = spec.N, m = spec.m, n = spec.n;
  const double half_pi = 0.5 * std::numbers::pi;

  g->h_r = (spec.R_out - spec.R) / static_cast<double>(nr - 1);
  g->h_theta = half_pi / static_cast<double>(nt - 1);
  g->r.resize(nr);
  g->theta.resize(nt);
  for (std::size_t i = 0; i < nr; ++i) g->r[i] = spec.R + static_cast<double>(i) * g->h_r;
  g->r[nr - 1] = spec.R_out;
  for (std::size_t j = 0; j < nt; ++j) g->theta[j] = static_cast<double>(j) * g->h_theta;
  g->theta[nt - 1] = half_pi;

  g->omega_m = sphere_area(m);
  g->omega_n = sphere_area(n);

  auto face_r = [&](std::size_t i) { return spec.R + (static_cast<double>(i) + 0.5) * g->h_r; };
  g->radial_volume.resize(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const double a = i == 0 ? spec.R : face_r(i - 1);
    const double b = i + 1 == nr ? spec.R_out : face_r(i);
    g->radial_volume[i] = (std::pow(b, N) - std::pow(a, N)) / N;
  }
  g->radial_flux.resize(nr - 1);
  for (std::size_t i = 0; i + 1 < nr; ++i) g->radial_flux[i] = std::pow(face_r(i), N - 1) / g->h_r;

  auto face_t = [&](std::size_t j) { return (static_cast<double>(j) + 0.5) * g->h_theta; };
  auto f = [m, n](double t) { return rho(t, m, n); };
  g->angular_volume.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double a = j == 0 ? 0.0 : face_t(j - 1);
    const double b = j + 1 == nt ? half_pi : face_t(j);
    g->angular_volume[j] = boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
  }
  g->theta_up.assign(nt, 0.0);
  g->theta_down.assign(nt, 0.0);
  const double h2 = g->h_theta;
  for (std::size_t j = 0; j + 1 < nt; ++j) {
    const double flux = rho(face_t(j), m, n) / h2;
    g->theta_up[j] = flux / g->angular_volume[j];
    g->theta_down[j + 1] = flux / g->angular_volume[j + 1];
  }

  g->weights.resize(nr * nt);
  const double surf = g->omega_m * g->omega_n;
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      g->weights[g->index(i, j)] = surf * g->radial_volume[i] * g->angular_volume[j];
  return g;
}

Field::Field(GridPtr g, double fill) : grid(std::move(g)), values(grid->size(), fill) {}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid || !b.grid) throw GridMismatchError("field without grid");
  if (a.grid == b.grid) return;
  const DomainSpec& x = a.grid->spec;
  const DomainSpec& y = b.grid->spec;
  if (x.N != y.N || x.m != y.m || x.n != y.n || x.n_r != y.n_r || x.n_theta != y.n_theta ||
      x.R != y.R || x.R_out != y.R_out) {
    throw GridMismatchError("fields live on different grids");
  }
}

double kappa(double theta, int m, int n) {
  if (!(theta > 0.0) || !(theta < 0.5 * std::numbers::pi)) {
    std::ostringstream os;
    os << "kappa is singular at theta = " << theta;
    throw SingularAngleError(os.str());
  }
  return (m - 1) * std::tan(theta) - (n - 1) / std::tan(theta);
}

Field laplacian_polar(const Field& u) {
  const Grid& g = *u.grid;
  if (u.values.size() != g.size()) throw GridMismatchError("field shape does not match grid");
  Field out(u.grid);
  const auto& k = kernels::active();
  for (std::size_t i = 1; i + 1 < g.nr; ++i) {
    const double* row = u.values.data() + g.index(i, 0);
    double* dst = out.values.data() + g.index(i, 0);
    k.stencil_row(g.row_stencil(i), 0.0, g.theta_up.data(), g.theta_down.data(), row - g.nt, row,
                  row + g.nt, dst, g.nt);
    for (std::size_t j = 0; j < g.nt; ++j) dst[j] = -dst[j];
  }
  return out;
}

double integrate(const Field& u) {
  const auto& w = u.grid->weights;
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * u.values[k];
  return acc;
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  return kernels::active().weighted_dot(u.grid->weights.data(), u.values.data(), v.values.data(),
                                        u.values.size());
}

double norm(const Field& u) { return std::sqrt(inner(u, u)); }

std::vector<double> antitonic_regression(const std::vector<double>& y, const std::vector<double>& w) {
  struct Block {
    double mean;
    double weight;
    std::size_t len;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    blocks.push_back({y[k], w[k], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double total = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / total;
      prev.weight = total;
      prev.len += top.len;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.len, b.mean);
  return out;
}

Field cone_project(const Field& u) {
  const Grid& g = *u.grid;
  Field out(u.grid);
  std::vector<double> row(g.nt);
  for (std::size_t i = 0; i < g.nr; ++i) {
    std::copy_n(u.values.begin() + static_cast<std::ptrdiff_t>(g.index(i, 0)), g.nt, row.begin());
    const auto fit = antitonic_regression(row, g.angular_volume);
    for (std::size_t j = 0; j < g.nt; ++j) out(i, j) = std::max(fit[j], 0.0);
  }
  return out;
}

ConeReport cone_membership(const Field& u, double tol) {
  const Grid& g = *u.grid;
  ConeReport rep;
  for (std::size_t i = 0; i < g.nr; ++i) {
    for (std::size_t j = 0; j < g.nt; ++j) {
      rep.negativity = std::max(rep.negativity, -u(i, j));
      if (j + 1 < g.nt) rep.monotonicity = std::max(rep.monotonicity, u(i, j + 1) - u(i, j));
    }
  }
  rep.member = rep.negativity <= tol && rep.monotonicity <= tol;
  return rep;
}

}  // namespace hamsys
