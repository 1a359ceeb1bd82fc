#include <algorithm>
#include <cmath>
#include <vector>

#include "hamsys/elliptic.hpp"
#include "hamsys/errors.hpp"

namespace hamsys {

HelmholtzSystem::HelmholtzSystem(GridPtr grid) : grid_(std::move(grid)) {
  const Grid& g = *grid_;
  diag_.assign(g.size(), 1.0);
  zero_row_.assign(g.nt, 0.0);
  for (std::size_t i = 1; i + 1 < g.nr; ++i) {
    const auto st = g.row_stencil(i);
    for (std::size_t j = 0; j < g.nt; ++j)
      diag_[g.index(i, j)] = 1.0 + st.c_in + st.c_out + st.s * (g.theta_up[j] + g.theta_down[j]);
  }
}

HelmholtzSystem assemble(const GridPtr& grid) { return HelmholtzSystem(grid); }

Field HelmholtzSystem::apply(const Field& u) const {
  const Grid& g = *grid_;
  if (u.values.size() != g.size()) throw GridMismatchError("field shape does not match grid");
  Field out(grid_);
  const auto& k = kernels::active();
  for (std::size_t i = 1; i + 1 < g.nr; ++i) {
    const double* row = u.values.data() + g.index(i, 0);
    k.stencil_row(g.row_stencil(i), 1.0, g.theta_up.data(), g.theta_down.data(), row - g.nt, row,
                  row + g.nt, out.values.data() + g.index(i, 0), g.nt);
  }
  for (std::size_t j = 0; j < g.nt; ++j) {
    out(0, j) = u(0, j);
    out(g.nr - 1, j) = u(g.nr - 1, j);
  }
  return out;
}

void HelmholtzSystem::apply_interior(const double* u, double* out) const {
  const Grid& g = *grid_;
  const auto& k = kernels::active();
  std::fill_n(out, g.nt, 0.0);
  std::fill_n(out + g.index(g.nr - 1, 0), g.nt, 0.0);
  for (std::size_t i = 1; i + 1 < g.nr; ++i) {
    const double* row = u + g.index(i, 0);
    const double* in = i == 1 ? zero_row_.data() : row - g.nt;
    const double* outer = i + 2 == g.nr ? zero_row_.data() : row + g.nt;
    k.stencil_row(g.row_stencil(i), 1.0, g.theta_up.data(), g.theta_down.data(), in, row, outer,
                  out + g.index(i, 0), g.nt);
  }
}

Field HelmholtzSystem::apply_interior(const Field& u) const {
  if (u.values.size() != grid_->size()) throw GridMismatchError("field shape does not match grid");
  Field out(grid_);
  apply_interior(u.values.data(), out.values.data());
  return out;
}

Eigen::SparseMatrix<double> HelmholtzSystem::matrix() const {
  const Grid& g = *grid_;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * g.size());
  for (std::size_t i = 0; i < g.nr; ++i) {
    for (std::size_t j = 0; j < g.nt; ++j) {
      const auto row = static_cast<int>(g.index(i, j));
      if (!g.interior_row(i)) {
        t.emplace_back(row, row, 1.0);
        continue;
      }
      const auto st = g.row_stencil(i);
      t.emplace_back(row, row, diag_[g.index(i, j)]);
      t.emplace_back(row, static_cast<int>(g.index(i - 1, j)), -st.c_in);
      t.emplace_back(row, static_cast<int>(g.index(i + 1, j)), -st.c_out);
      if (j + 1 < g.nt) t.emplace_back(row, row + 1, -st.s * g.theta_up[j]);
      if (j > 0) t.emplace_back(row, row - 1, -st.s * g.theta_down[j]);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<int>(g.size()), static_cast<int>(g.size()));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Eigen::SparseMatrix<double> HelmholtzSystem::interior_matrix() const {
  const Grid& g = *grid_;
  const std::size_t ni = g.nr - 2;
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<int>((i - 1) * g.nt + j); };
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * ni * g.nt);
  for (std::size_t i = 1; i + 1 < g.nr; ++i) {
    const auto st = g.row_stencil(i);
    for (std::size_t j = 0; j < g.nt; ++j) {
      const int row = id(i, j);
      t.emplace_back(row, row, diag_[g.index(i, j)]);
      if (i > 1) t.emplace_back(row, id(i - 1, j), -st.c_in);
      if (i + 2 < g.nr) t.emplace_back(row, id(i + 1, j), -st.c_out);
      if (j + 1 < g.nt) t.emplace_back(row, row + 1, -st.s * g.theta_up[j]);
      if (j > 0) t.emplace_back(row, row - 1, -st.s * g.theta_down[j]);
    }
  }
  const auto n = static_cast<int>(ni * g.nt);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Field helmholtz_solve(const HelmholtzSystem& sys, const Field& f, double tol, SolveStats* stats,
                      const Field* guess) {
  const Grid& g = *sys.grid();
  if (f.values.size() != g.size()) throw GridMismatchError("right-hand side does not match grid");
  if (!(tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  if (!f.all_finite()) throw ValidationError("right-hand side is not finite");
  const auto& k = kernels::active();
  const std::size_t n = g.size();
  const double* w = g.weights.data();

  std::vector<double> rhs = f.values;
  std::fill_n(rhs.begin(), g.nt, 0.0);
  std::fill_n(rhs.begin() + static_cast<std::ptrdiff_t>(g.index(g.nr - 1, 0)), g.nt, 0.0);

  Field u(sys.grid());
  SolveStats local;
  const double fnorm = std::sqrt(k.weighted_dot(w, rhs.data(), rhs.data(), n));
  if (fnorm == 0.0) {
    if (stats) *stats = local;
    return u;
  }

  std::vector<double> r(n), z(n), p(n), ap(n), minv(n);
  for (std::size_t q = 0; q < n; ++q) minv[q] = 1.0 / sys.diagonal()[q];
  std::fill_n(minv.begin(), g.nt, 0.0);
  std::fill_n(minv.begin() + static_cast<std::ptrdiff_t>(g.index(g.nr - 1, 0)), g.nt, 0.0);

  if (guess != nullptr) {
    require_same_grid(*guess, f);
    u.values = guess->values;
    std::fill_n(u.values.begin(), g.nt, 0.0);
    std::fill_n(u.values.begin() + static_cast<std::ptrdiff_t>(g.index(g.nr - 1, 0)), g.nt, 0.0);
    sys.apply_interior(u.values.data(), ap.data());
    for (std::size_t q = 0; q < n; ++q) r[q] = rhs[q] - ap[q];
  } else {
    r = rhs;
  }

  const int cap = static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  double res = std::sqrt(k.weighted_dot(w, r.data(), r.data(), n)) / fnorm;
  k.mul(minv.data(), r.data(), z.data(), n);
  p = z;
  double rz = k.weighted_dot(w, r.data(), z.data(), n);
  int it = 0;
  while (res > tol) {
    if (it >= cap) throw NonConvergenceError("helmholtz_solve: iteration cap reached", res);
    sys.apply_interior(p.data(), ap.data());
    const double pap = k.weighted_dot(w, p.data(), ap.data(), n);
    if (!(pap > 0.0) || !(rz > 0.0)) throw NonConvergenceError("helmholtz_solve: CG breakdown", res);
    const double alpha = rz / pap;
    k.axpy(alpha, p.data(), u.values.data(), n);
    k.axpy(-alpha, ap.data(), r.data(), n);
    ++it;
    const double next = std::sqrt(k.weighted_dot(w, r.data(), r.data(), n)) / fnorm;
    if (!std::isfinite(next)) throw NonConvergenceError("helmholtz_solve: residual is not finite", res);
    res = next;
    if (res <= tol) break;
    k.mul(minv.data(), r.data(), z.data(), n);
    const double rz_new = k.weighted_dot(w, r.data(), z.data(), n);
    k.xpby(z.data(), rz_new / rz, p.data(), n);
    rz = rz_new;
  }
  local.iterations = it;
  local.residual = res;
  if (stats) *stats = local;
  return u;
}

InvarianceResult pointwise_invariance_step(const HelmholtzSystem& sys, const Field& u,
                                           const Field& w, double d, double tol) {
  require_same_grid(u, w);
  if (!(d > 2.0)) throw ValidationError("pointwise_invariance_step requires d > 2");
  Field rhs(u.grid);
  for (std::size_t q = 0; q < rhs.size(); ++q)
    rhs.values[q] = w.values[q] * std::pow(std::max(u.values[q], 0.0), d - 1.0);
  InvarianceResult out;
  out.v = helmholtz_solve(sys, rhs, tol, &out.stats);
  double vmax = 0.0;
  for (double x : out.v.values) vmax = std::max(vmax, std::abs(x));
  out.cone = cone_membership(out.v, 10.0 * tol * std::max(1.0, vmax));
  return out;
}

}  // namespace hamsys
