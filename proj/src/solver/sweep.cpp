#include <algorithm>
#include <atomic>
#include <thread>

#include "hamsys/errors.hpp"
#include "hamsys/solver.hpp"

namespace hamsys {

SweepResult multiplicity_sweep(const DomainSpec& base, double p, double q, int k,
                               const std::string& weights, const SolverOptions& opts, int threads,
                               int continuation_steps) {
  const int N = base.N;
  if (k < 2 || k > N / 2) throw ValidationError("multiplicity_sweep: 2 <= k <= floor(N/2) violated");
  if (threads < 1) throw ValidationError("threads must be at least 1");

  SweepResult out;
  for (int n = 2; n <= k; ++n) out.entries.push_back({N - n, n, std::nullopt, {}});

  auto run_one = [&](SweepEntry& e) {
    try {
      DomainSpec spec = base;
      spec.m = e.m;
      spec.n = e.n;
      const GridPtr grid = build_grid(spec);
      const WeightPair wp = make_weights(weights, grid);
      const ExponentPair ep = ExponentPair::make(p, q, N, e.n);
      e.solution = continuation_steps > 0 ? continuation_solve(wp, ep, continuation_steps, opts) : mountain_pass_solve(wp, ep, opts);
      if (!e.solution->accepted) e.error = "solution rejected by acceptance checks";
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < out.entries.size(); idx = next++) run_one(out.entries[idx]);
  };
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), out.entries.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t a = 0; a < out.entries.size(); ++a)
    for (std::size_t b = a + 1; b < out.entries.size(); ++b) {
      const auto& ea = out.entries[a];
      const auto& eb = out.entries[b];
      if (!ea.solution || !eb.solution || !ea.solution->accepted || !eb.solution->accepted) continue;
      out.distinctness.push_back(
          {{ea.n, eb.n}, distinctness_check(*ea.solution, *eb.solution, opts.radial_tol)});
    }
  return out;
}

}  // namespace hamsys
