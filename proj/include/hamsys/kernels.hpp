#pragma once

// Data-parallel inner loops shared by every grid operator.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is chosen once at startup from the CPU feature bits and
// can be pinned with HAMSYS_SIMD=scalar|avx2 or kernels::select().

#include <cstddef>
#include <string_view>

namespace hamsys::kernels {

enum class Isa { scalar, avx2 };

// One interior radial row of the five-point operator
//
//   out_j = (shift + c_in + c_out + s (up_j + down_j)) u_j
//           - c_in in_j - c_out out_j - s up_j u_{j+1} - s down_j u_{j-1}
//
// Requires n >= 2. down_0 and up_{n-1} must be zero; u_{-1} and u_n are never read.
struct RowStencil {
  double c_in = 0.0;   // coupling to the row at r_{i-1}
  double c_out = 0.0;  // coupling to the row at r_{i+1}
  double s = 0.0;      // 1 / r_i^2
};

struct KernelTable {
  Isa isa;
  void (*stencil_row)(const RowStencil& st, double shift, const double* up, const double* down,
                      const double* u_in, const double* u, const double* u_out, double* out,
                      std::size_t n);
  // sum_k w_k x_k y_k
  double (*weighted_dot)(const double* w, const double* x, const double* y, std::size_t n);
  // y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = x + beta y
  void (*xpby)(const double* x, double beta, double* y, std::size_t n);
  // out = x * y
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();

Isa detect_best();
const KernelTable& active();
void select(Isa isa);
std::string_view isa_name(Isa isa);

}  // namespace hamsys::kernels
