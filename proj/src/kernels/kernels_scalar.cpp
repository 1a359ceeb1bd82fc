#include "hamsys/kernels.hpp"

namespace hamsys::kernels {
namespace {

void stencil_row_scalar(const RowStencil& st, double shift, const double* up, const double* down,
                        const double* u_in, const double* u, const double* u_out, double* out,
                        std::size_t n) {
  const double radial = shift + st.c_in + st.c_out;
  {
    const double diag = radial + st.s * up[0];
    out[0] = diag * u[0] - st.c_in * u_in[0] - st.c_out * u_out[0] - st.s * up[0] * u[1];
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double diag = radial + st.s * (up[j] + down[j]);
    out[j] = diag * u[j] - st.c_in * u_in[j] - st.c_out * u_out[j] - st.s * up[j] * u[j + 1] -
             st.s * down[j] * u[j - 1];
  }
  {
    const std::size_t j = n - 1;
    const double diag = radial + st.s * down[j];
    out[j] = diag * u[j] - st.c_in * u_in[j] - st.c_out * u_out[j] - st.s * down[j] * u[j - 1];
  }
}

double weighted_dot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * x[k] * y[k];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + beta * y[k];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] * y[k];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, stencil_row_scalar, weighted_dot_scalar,
                                 axpy_scalar, xpby_scalar, mul_scalar};
  return table;
}

}  // namespace hamsys::kernels
