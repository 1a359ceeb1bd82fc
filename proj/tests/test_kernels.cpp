#include <doctest.h>

#include <random>
#include <vector>

#include "hamsys/elliptic.hpp"
#include "hamsys/kernels.hpp"
#include "support.hpp"

using namespace hamsys;
namespace k = hamsys::kernels;

namespace {

std::vector<double> rnd(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = U(rng);
  return v;
}

struct IsaGuard {
  k::Isa saved = k::active().isa;
  ~IsaGuard() { k::select(saved); }
};

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(k::scalar_table().isa == k::Isa::scalar);
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const k::KernelTable* simd = k::avx2_table();
  if (!simd) {
    MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
    return;
  }
  const k::KernelTable& ref = k::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 17u, 33u, 65u, 129u, 1000u}) {
    CAPTURE(n);
    const auto u_in = rnd(rng, n), u = rnd(rng, n), u_out = rnd(rng, n);
    auto up = rnd(rng, n, 0.0, 5.0), down = rnd(rng, n, 0.0, 5.0);
    if (n) {
      up[n - 1] = 0.0;
      down[0] = 0.0;
    }
    const k::RowStencil st{3.5, 2.25, 0.125};
    std::vector<double> a(n), b(n);
    if (n >= 2) {
      ref.stencil_row(st, 1.0, up.data(), down.data(), u_in.data(), u.data(), u_out.data(), a.data(), n);
      simd->stencil_row(st, 1.0, up.data(), down.data(), u_in.data(), u.data(), u_out.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-14).scale(10.0));
    }

    const auto w = rnd(rng, n, 0.0, 2.0);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[i] * u[i] * u_in[i]);
    CHECK(std::abs(ref.weighted_dot(w.data(), u.data(), u_in.data(), n) -
                   simd->weighted_dot(w.data(), u.data(), u_in.data(), n)) <= 1e-14 * (1.0 + mag));

    auto y1 = u_out, y2 = u_out;
    ref.axpy(0.75, u.data(), y1.data(), n);
    simd->axpy(0.75, u.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15).scale(1.0));

    y1 = u_out;
    y2 = u_out;
    ref.xpby(u.data(), -0.3, y1.data(), n);
    simd->xpby(u.data(), -0.3, y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-15).scale(1.0));

    ref.mul(u.data(), u_in.data(), a.data(), n);
    simd->mul(u.data(), u_in.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == a[i]);
  }
}

TEST_CASE("solver output agrees between kernel variants") {
  if (!k::avx2_table()) return;
  IsaGuard guard;
  const auto g = testing::grid(5, 3, 2, 65, 33);
  const HelmholtzSystem sys(g);
  const Field f = testing::bump(g, 2);
  k::select(k::Isa::scalar);
  CHECK(k::active().isa == k::Isa::scalar);
  const Field a = helmholtz_solve(sys, f, 1e-12);
  k::select(k::Isa::avx2);
  CHECK(k::active().isa == k::Isa::avx2);
  const Field b = helmholtz_solve(sys, f, 1e-12);
  CHECK(testing::rel_diff(b, a) <= 1e-10);
  const Field aa = sys.apply_interior(a);
  k::select(k::Isa::scalar);
  const Field ab = sys.apply_interior(a);
  CHECK(testing::rel_diff(aa, ab) <= 1e-12);
}

TEST_CASE("selecting an unavailable variant throws") {
  if (k::avx2_table()) return;
  CHECK_THROWS(k::select(k::Isa::avx2));
}
