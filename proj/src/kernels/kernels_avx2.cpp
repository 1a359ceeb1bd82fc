// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.

#include <immintrin.h>

#include "hamsys/kernels.hpp"

namespace hamsys::kernels {
namespace {

void stencil_row_avx2(const RowStencil& st, double shift, const double* up, const double* down,
                      const double* u_in, const double* u, const double* u_out, double* out,
                      std::size_t n) {
  const double radial = shift + st.c_in + st.c_out;
  out[0] = (radial + st.s * up[0]) * u[0] - st.c_in * u_in[0] - st.c_out * u_out[0] -
           st.s * up[0] * u[1];

  const __m256d v_radial = _mm256_set1_pd(radial);
  const __m256d v_s = _mm256_set1_pd(st.s);
  const __m256d v_cin = _mm256_set1_pd(st.c_in);
  const __m256d v_cout = _mm256_set1_pd(st.c_out);

  std::size_t j = 1;
  for (; j + 4 < n; j += 4) {
    const __m256d a = _mm256_mul_pd(v_s, _mm256_loadu_pd(up + j));
    const __m256d b = _mm256_mul_pd(v_s, _mm256_loadu_pd(down + j));
    const __m256d uc = _mm256_loadu_pd(u + j);
    const __m256d diag = _mm256_add_pd(v_radial, _mm256_add_pd(a, b));
    __m256d acc = _mm256_mul_pd(diag, uc);
    acc = _mm256_fnmadd_pd(v_cin, _mm256_loadu_pd(u_in + j), acc);
    acc = _mm256_fnmadd_pd(v_cout, _mm256_loadu_pd(u_out + j), acc);
    acc = _mm256_fnmadd_pd(a, _mm256_loadu_pd(u + j + 1), acc);
    acc = _mm256_fnmadd_pd(b, _mm256_loadu_pd(u + j - 1), acc);
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j + 1 < n; ++j) {
    const double diag = radial + st.s * (up[j] + down[j]);
    out[j] = diag * u[j] - st.c_in * u_in[j] - st.c_out * u_out[j] - st.s * up[j] * u[j + 1] -
             st.s * down[j] * u[j - 1];
  }
  const std::size_t last = n - 1;
  out[last] = (radial + st.s * down[last]) * u[last] - st.c_in * u_in[last] -
              st.c_out * u_out[last] - st.s * down[last] * u[last - 1];
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_dot_avx2(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(x + k));
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + k + 4), _mm256_loadu_pd(x + k + 4));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(y + k), acc0);
    acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(y + k + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += w[k] * x[k] * y[k];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void xpby_avx2(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + k), _mm256_loadu_pd(x + k)));
  }
  for (; k < n; ++k) y[k] = x[k] + beta * y[k];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) out[k] = x[k] * y[k];
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{Isa::avx2, stencil_row_avx2, weighted_dot_avx2, axpy_avx2,
                                 xpby_avx2, mul_avx2};
  return table;
}

}  // namespace hamsys::kernels
