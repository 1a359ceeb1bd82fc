#pragma once

// Truncated exterior domain {R < |x| < R_out} in R^N = R^m x R^n, reduced to
// the coordinates r = |x| and theta = atan(|t| / |s|) with s in R^m, t in R^n.
//
// Discretization: uniform nodes r_i = R + i h_r, theta_j = j h_theta. Every node
// owns the dual cell [r_i -+ h_r/2] x [theta_j -+ h_theta/2] clipped to the
// domain, and the quadrature weight of a node is the exact N-dimensional volume
// of that cell. Fluxes through cell faces are evaluated at the face midpoints,
// which yields a symmetric (in the weighted inner product) second-order
// finite-volume Laplacian whose theta = 0, pi/2 rows carry the reflection
// closure automatically (zero face flux outside [0, pi/2]).

#include <cstddef>
#include <memory>
#include <vector>

#include "hamsys/kernels.hpp"

namespace hamsys {

struct DomainSpec {
  int N = 4;
  int m = 2;
  int n = 2;
  double R = 1.0;
  double R_out = 10.0;
  int n_r = 65;
  int n_theta = 33;

  // Throws ValidationError naming the violated invariant.
  void validate() const;
};

// |S^{k-1}| = 2 pi^{k/2} / Gamma(k/2)
double sphere_area(int k);

struct Grid {
  DomainSpec spec;
  std::size_t nr = 0;
  std::size_t nt = 0;
  double h_r = 0.0;
  double h_theta = 0.0;
  std::vector<double> r;
  std::vector<double> theta;
  double omega_m = 0.0;  // |S^{m-1}|
  double omega_n = 0.0;  // |S^{n-1}|

  // int r^{N-1} dr over the dual radial cell
  std::vector<double> radial_volume;
  // int cos^{m-1} sin^{n-1} dtheta over the dual angular cell
  std::vector<double> angular_volume;
  // r_{i+1/2}^{N-1} / h_r, size nr-1
  std::vector<double> radial_flux;
  // rho(theta_{j+1/2}) / (h_theta V_j) and rho(theta_{j-1/2}) / (h_theta V_j);
  // theta_up[nt-1] = theta_down[0] = 0
  std::vector<double> theta_up;
  std::vector<double> theta_down;
  // omega_m omega_n radial_volume[i] angular_volume[j], row-major
  std::vector<double> weights;

  std::size_t size() const { return nr * nt; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nt + j; }
  bool interior_row(std::size_t i) const { return i > 0 && i + 1 < nr; }
  kernels::RowStencil row_stencil(std::size_t i) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const DomainSpec& spec);

// Values on the grid, row-major by radius: values[i * nt + j] = u(r_i, theta_j).
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0);

  template <class F>
  static Field sample(const GridPtr& g, F&& f) {
    Field out(g);
    for (std::size_t i = 0; i < g->nr; ++i)
      for (std::size_t j = 0; j < g->nt; ++j) out.values[g->index(i, j)] = f(g->r[i], g->theta[j]);
    return out;
  }

  double& operator()(std::size_t i, std::size_t j) { return values[grid->index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values[grid->index(i, j)]; }
  std::size_t size() const { return values.size(); }
  bool all_finite() const;
};

// Throws GridMismatchError unless both fields live on grids of identical shape and extent.
void require_same_grid(const Field& a, const Field& b);

// (m-1) tan(theta) - (n-1) cot(theta); SingularAngleError outside (0, pi/2).
double kappa(double theta, int m, int n);

// Delta u at nodes of interior radial rows, 0 on the rows r = R and r = R_out.
// Boundary values of u are read as given.
Field laplacian_polar(const Field& u);

// sum_ij w_ij u_ij
double integrate(const Field& u);

// sum_ij w_ij u_ij v_ij
double inner(const Field& u, const Field& v);
double norm(const Field& u);

// Least-squares nonincreasing fit with positive weights (pool adjacent violators).
std::vector<double> antitonic_regression(const std::vector<double>& y, const std::vector<double>& w);

// Closest field in the weighted norm with u >= 0 and u nonincreasing in theta.
Field cone_project(const Field& u);

struct ConeReport {
  double negativity = 0.0;    // max(0, -min u)
  double monotonicity = 0.0;  // max(0, max_j u_{j+1} - u_j)
  bool member = true;
};

ConeReport cone_membership(const Field& u, double tol);

}  // namespace hamsys
