#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "hamsys/domain.hpp"

namespace hamsys {

// The operator A = -Delta + 1 of the domain discretization with homogeneous
// Dirichlet rows at r = R and r = R_out. A is self-adjoint in the weighted
// inner product <u, v>_w on fields that vanish on both radial boundaries.
class HelmholtzSystem {
 public:
  explicit HelmholtzSystem(GridPtr grid);

  const GridPtr& grid() const { return grid_; }

  // Interior rows: -Delta u + u reading the boundary rows of u as given.
  // Boundary rows: identity.
  Field apply(const Field& u) const;

  // Interior rows: A applied to u with its boundary rows replaced by zero.
  // Boundary rows of the result are zero.
  void apply_interior(const double* u, double* out) const;
  Field apply_interior(const Field& u) const;

  // Diagonal of the interior operator (boundary entries set to 1).
  const std::vector<double>& diagonal() const { return diag_; }

  // Full operator with identity boundary rows, node ordering as in Field.
  Eigen::SparseMatrix<double> matrix() const;

  // Operator restricted to interior unknowns, ordered (i-1) * nt + j.
  Eigen::SparseMatrix<double> interior_matrix() const;

 private:
  GridPtr grid_;
  std::vector<double> diag_;
  std::vector<double> zero_row_;
};

HelmholtzSystem assemble(const GridPtr& grid);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // ||f - A u||_w / ||f||_w on interior rows
};

inline constexpr double kDefaultSolveTol = 1e-10;

// Solves A u = f on interior rows with u = 0 on both radial boundaries by
// Jacobi-preconditioned conjugate gradients in the weighted inner product.
// The boundary rows of f are ignored. `guess` (if non-null) seeds the iteration.
// Throws NonConvergenceError once the iteration cap 50 sqrt(n_r n_theta) is hit.
Field helmholtz_solve(const HelmholtzSystem& sys, const Field& f, double tol = kDefaultSolveTol,
                      SolveStats* stats = nullptr, const Field* guess = nullptr);

struct InvarianceResult {
  Field v;
  ConeReport cone;
  SolveStats stats;
};

// Solves -Delta v + v = w u^{d-1} and reports cone membership of v at 10 tol
// relative to max |v|.
InvarianceResult pointwise_invariance_step(const HelmholtzSystem& sys, const Field& u,
                                           const Field& w, double d, double tol = kDefaultSolveTol);

}  // namespace hamsys
