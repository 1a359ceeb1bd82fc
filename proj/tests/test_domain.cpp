#include <doctest.h>

#include <numbers>
#include <random>

#include "hamsys/domain.hpp"
#include "hamsys/errors.hpp"
#include "support.hpp"

using namespace hamsys;
using std::numbers::pi;

namespace {

// weighted L2 norm of Delta u - expected over interior rows
template <class U, class L>
double laplacian_error(const GridPtr& g, U&& u, L&& lap) {
  const Field f = Field::sample(g, u);
  const Field d = laplacian_polar(f);
  Field e(g);
  for (std::size_t i = 1; i + 1 < g->nr; ++i)
    for (std::size_t j = 0; j < g->nt; ++j) e(i, j) = d(i, j) - lap(g->r[i], g->theta[j]);
  return norm(e);
}

// exhaustive least-squares nonincreasing fit over all partitions into blocks
std::vector<double> brute_antitonic(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_fit;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 == n || (mask >> i) & 1u) {
        double sw = 0.0, sy = 0.0;
        for (std::size_t k = start; k <= i; ++k) {
          sw += w[k];
          sy += w[k] * y[k];
        }
        for (std::size_t k = start; k <= i; ++k) fit[k] = sy / sw;
        start = i + 1;
      }
    }
    bool mono = true;
    for (std::size_t i = 0; i + 1 < n; ++i) mono = mono && fit[i + 1] <= fit[i] + 1e-15;
    if (!mono) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += w[i] * (fit[i] - y[i]) * (fit[i] - y[i]);
    if (sse < best) {
      best = sse;
      best_fit = fit;
    }
  }
  return best_fit;
}

}  // namespace

TEST_CASE("build_grid: uniform nodes on a 3x3 grid") {
  const auto g = testing::grid(4, 2, 2, 3, 3, 1.0, 2.0);
  REQUIRE(g->nr == 3);
  REQUIRE(g->nt == 3);
  CHECK(g->r[0] == 1.0);
  CHECK(g->r[1] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(g->r[2] == 2.0);
  CHECK(g->theta[0] == 0.0);
  CHECK(g->theta[1] == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(g->theta[2] == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(g->omega_m == doctest::Approx(2 * pi));
  CHECK(g->omega_n == doctest::Approx(2 * pi));
}

TEST_CASE("DomainSpec validation names the violated invariant") {
  auto expect = [](DomainSpec s, const char* what) {
    CAPTURE(what);
    try {
      s.validate();
      FAIL("no error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  DomainSpec s;
  s.N = 5;
  s.m = 2;
  s.n = 2;
  expect(s, "N = m + n");
  s = DomainSpec{};
  s.N = 5, s.m = 2, s.n = 3;
  expect(s, "n <= m");
  s = DomainSpec{};
  s.N = 4, s.m = 3, s.n = 1;
  expect(s, "n > 1");
  s = DomainSpec{};
  s.N = 3, s.m = 1, s.n = 2;
  expect(s, "n <= m");
  s = DomainSpec{};
  s.R_out = 1.0;
  expect(s, "R_out > R");
  s = DomainSpec{};
  s.R = -1.0;
  expect(s, "R > 0");
  s = DomainSpec{};
  s.n_r = 2;
  expect(s, "n_r >= 3");
  s = DomainSpec{};
  s.n_theta = 2;
  expect(s, "n_theta >= 3");
  CHECK_THROWS_AS(build_grid(s), ValidationError);
}

TEST_CASE("integrate(1) equals the shell volume") {
  for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {4, 2}, {3, 3}, {5, 3}}) {
    const int N = m + n;
    for (int res : {3, 9, 33}) {
      CAPTURE(m);
      CAPTURE(n);
      CAPTURE(res);
      const auto g = testing::grid(N, m, n, res, res, 1.0, 3.0);
      const double shell = sphere_area(N) * (std::pow(3.0, N) - 1.0) / N;
      CHECK(integrate(Field(g, 1.0)) == doctest::Approx(shell).epsilon(1e-12));
    }
  }
}

TEST_CASE("angular volumes reproduce the Beta-function identity") {
  for (auto [m, n] : {std::pair{2, 2}, {4, 2}, {3, 3}, {6, 4}}) {
    const auto g = testing::grid(m + n, m, n, 3, 17);
    double total = 0.0;
    for (double v : g->angular_volume) total += v;
    CHECK(total * g->omega_m * g->omega_n == doctest::Approx(sphere_area(m + n)).epsilon(1e-13));
  }
}

TEST_CASE("weights are positive and the theta = 0 weight scales like h^n") {
  // relative to an interior node the ratio behaves like h^{n-1}
  for (auto [m, n] : {std::pair{3, 2}, {3, 3}}) {
    double prev = 0.0;
    for (int nt : {17, 33, 65, 129}) {
      const auto g = testing::grid(m + n, m, n, 9, nt);
      for (double w : g->weights) CHECK(w > 0.0);
      const double ratio = g->weights[g->index(4, 0)] / g->weights[g->index(4, nt / 2)];
      if (prev > 0.0) {
        CAPTURE(n);
        CHECK(prev / ratio == doctest::Approx(std::pow(2.0, n - 1)).epsilon(0.02));
      }
      prev = ratio;
    }
  }
}

TEST_CASE("kappa") {
  CHECK(kappa(pi / 4, 3, 2) == doctest::Approx(1.0));
  CHECK(kappa(pi / 4, 5, 2) == doctest::Approx(3.0));
  CHECK(std::abs(kappa(pi / 4, 3, 3)) < 1e-14);
  CHECK(kappa(pi / 3, 3, 2) == doctest::Approx(2 * std::sqrt(3.0) - 1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(kappa(0.0, 3, 2), SingularAngleError);
  CHECK_THROWS_AS(kappa(pi / 2, 3, 2), SingularAngleError);
  CHECK_THROWS_AS(kappa(-0.1, 3, 2), SingularAngleError);
}

TEST_CASE("laplacian of a constant vanishes") {
  const auto g = testing::grid(6, 4, 2, 17, 9);
  const Field d = laplacian_polar(Field(g, 3.0));
  CHECK(testing::max_abs(d) < 1e-12);
}

TEST_CASE("laplacian of r^{2-N} converges at second order") {
  for (auto [m, n] : {std::pair{2, 2}, {3, 2}, {4, 2}}) {
    const int N = m + n;
    std::vector<double> err;
    for (int res : {65, 129, 257, 513}) {
      const auto g = testing::grid(N, m, n, res, 9, 1.0, 3.0);
      err.push_back(laplacian_error(g, [&](double r, double) { return std::pow(r, 2.0 - N); },
                                    [](double, double) { return 0.0; }));
    }
    for (std::size_t k = 1; k < err.size(); ++k) {
      CAPTURE(N);
      CHECK(std::log2(err[k - 1] / err[k]) >= 1.9);
    }
  }
}

TEST_CASE("laplacian of phi(r) eta(theta) separates with mu = 2N") {
  const int m = 3, n = 2, N = 5;
  auto phi = [](double r) { return std::sin(r) * std::exp(-r); };
  auto dphi = [](double r) { return (std::cos(r) - std::sin(r)) * std::exp(-r); };
  auto ddphi = [](double r) { return -2.0 * std::cos(r) * std::exp(-r); };
  auto eta = [&](double t) { return double(m - n) / N - std::cos(2 * t); };
  std::vector<double> err;
  for (int res : {17, 33, 65, 129}) {
    const auto g = testing::grid(N, m, n, res, res, 1.0, 3.0);
    err.push_back(laplacian_error(
        g, [&](double r, double t) { return phi(r) * eta(t); },
        [&](double r, double t) { return (ddphi(r) + (N - 1) * dphi(r) / r - 2.0 * N * phi(r) / (r * r)) * eta(t); }));
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.9);
}

TEST_CASE("integrate is linear") {
  std::mt19937_64 rng(3);
  const auto g = testing::grid(5, 3, 2, 17, 9);
  const Field u = testing::random_field(g, rng), v = testing::random_field(g, rng);
  Field c(g);
  for (std::size_t k = 0; k < c.size(); ++k) c.values[k] = 2.5 * u.values[k] - 0.75 * v.values[k];
  const double lhs = integrate(c), rhs = 2.5 * integrate(u) - 0.75 * integrate(v);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(integrate(u)) + std::abs(integrate(v)) + 1.0));
  CHECK(integrate(Field(g)) == 0.0);
}

TEST_CASE("antitonic regression matches exhaustive search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.1, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4;
    std::vector<double> y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = U(rng);
      w[i] = W(rng);
    }
    const auto fit = antitonic_regression(y, w);
    const auto oracle = brute_antitonic(y, w);
    for (std::size_t i = 0; i < n; ++i) CHECK(fit[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  }
}

TEST_CASE("antitonic regression of an increasing row with equal weights is the mean") {
  const std::vector<double> y = {0.1, 0.4, 0.5, 2.0};
  const auto fit = antitonic_regression(y, {1.0, 1.0, 1.0, 1.0});
  for (double f : fit) CHECK(f == doctest::Approx(0.75));
}

TEST_CASE("cone projection") {
  std::mt19937_64 rng(5);
  const auto g = testing::grid(5, 3, 2, 9, 17);
  SUBCASE("u = -1 projects to 0") {
    const Field p = cone_project(Field(g, -1.0));
    CHECK(testing::max_abs(p) == 0.0);
  }
  SUBCASE("members are fixed points and projection is idempotent") {
    const Field c = Field::sample(g, [](double r, double t) { return r * std::cos(t); });
    CHECK(testing::rel_diff(cone_project(c), c) <= 1e-15);
    for (int k = 0; k < 20; ++k) {
      const Field p = cone_project(testing::random_field(g, rng));
      CHECK(cone_membership(p, 0.0).member);
      CHECK(testing::rel_diff(cone_project(p), p) <= 1e-15);
    }
  }
  SUBCASE("projection is nonexpansive in the weighted norm") {
    for (int k = 0; k < 50; ++k) {
      const Field a = testing::random_field(g, rng), b = testing::random_field(g, rng);
      Field d1(g), d2(g);
      const Field pa = cone_project(a), pb = cone_project(b);
      for (std::size_t i = 0; i < d1.size(); ++i) {
        d1.values[i] = pa.values[i] - pb.values[i];
        d2.values[i] = a.values[i] - b.values[i];
      }
      CHECK(norm(d1) <= norm(d2) * (1.0 + 1e-14));
    }
  }
  SUBCASE("projection is the closest member among random cone fields") {
    const Field u = testing::random_field(g, rng);
    const Field p = cone_project(u);
    Field d(g);
    for (std::size_t i = 0; i < d.size(); ++i) d.values[i] = u.values[i] - p.values[i];
    const double best = norm(d);
    for (int k = 0; k < 200; ++k) {
      const Field c = cone_project(testing::random_field(g, rng));
      for (std::size_t i = 0; i < d.size(); ++i) d.values[i] = u.values[i] - c.values[i];
      CHECK(norm(d) >= best * (1.0 - 1e-14));
    }
  }
}

TEST_CASE("cone membership of cos and sin") {
  const auto g = testing::grid(5, 3, 2, 9, 17);
  CHECK(cone_membership(Field::sample(g, [](double, double t) { return std::cos(t); }), 0.0).member);
  const ConeReport rep = cone_membership(Field::sample(g, [](double, double t) { return std::sin(t); }), 1e-12);
  CHECK_FALSE(rep.member);
  CHECK(rep.negativity == 0.0);
  CHECK(rep.monotonicity == doctest::Approx(std::sin(g->h_theta)).epsilon(1e-12));
}

TEST_CASE("fields on different grids are rejected") {
  const auto a = testing::grid(5, 3, 2, 9, 17);
  const auto b = testing::grid(5, 3, 2, 9, 9);
  CHECK_THROWS_AS(require_same_grid(Field(a), Field(b)), GridMismatchError);
  CHECK_THROWS_AS(inner(Field(a), Field(b)), GridMismatchError);
}
