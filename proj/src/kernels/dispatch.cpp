#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hamsys/kernels.hpp"

namespace hamsys::kernels {

#if defined(HAMSYS_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(HAMSYS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  Isa isa = detect_best();
  if (const char* env = std::getenv("HAMSYS_SIMD")) {
    const std::string want(env);
    if (want == "scalar") {
      isa = Isa::scalar;
    } else if (want == "avx2" && avx2_table() == nullptr) {
      throw std::runtime_error("HAMSYS_SIMD=avx2 requested but AVX2 kernels are unavailable");
    }
  }
  return isa == Isa::avx2 ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(HAMSYS_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

Isa detect_best() { return avx2_table() != nullptr ? Isa::avx2 : Isa::scalar; }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::avx2) {
    const KernelTable* t = avx2_table();
    if (t == nullptr) throw std::runtime_error("AVX2 kernels are unavailable on this CPU/build");
    current().store(t);
  } else {
    current().store(&scalar_table());
  }
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace hamsys::kernels
