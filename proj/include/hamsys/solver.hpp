#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamsys/domain.hpp"
#include "hamsys/elliptic.hpp"
#include "hamsys/functional.hpp"

namespace hamsys {

struct SolverOptions {
  double accept_tol = 1e-8;
  double cg_tol = kDefaultSolveTol;
  int path_points = 33;
  int mp_max_iter = 300;
  double mp_grad_tol = 1e-5;  // relative gradient at which the path stage hands over to Newton
  int newton_max_iter = 40;
  std::uint64_t seed = 12345;
  std::vector<std::string> seed_profiles = {"radial", "cos2", "cos8"};
  std::size_t szulkin_trials = 50;
  double szulkin_delta = 1e-3;
  double radial_tol = 1e-3;
  bool allow_outside_window = true;
  // restrict the path stage to theta-independent fields (radial candidate)
  bool radial_only = false;
};

struct Candidate {
  std::string profile;
  double path_max = 0.0;
  double energy = 0.0;
  double radiality = 0.0;
  int iterations = 0;
  bool accepted = false;
  std::string note;
};

struct SolutionPair {
  Field u;
  Field v;
  int m = 0;
  int n = 0;
  double p = 0.0;
  double q = 0.0;
  double residual_u = 0.0;  // ||Au - a v^{p-1}||_w / ||a v^{p-1}||_w
  double residual_v = 0.0;  // ||Av - b u^{q-1}||_w / ||b u^{q-1}||_w
  double energy = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  ConeReport cone_u;
  ConeReport cone_v;
  double positivity_margin = 0.0;  // min of u, v over nodes of interior rows
  double roundtrip_error = 0.0;    // ||inversion_map(u) - v|| / ||v||
  double roundtrip_u_error = 0.0;  // ||A^{-1}(a inversion_map(u)^{p-1}) - u|| / ||u||
  double invariance_error = 0.0;   // ||A^{-1}(b u^{q-1}) - v|| / ||v||
  double radiality = 0.0;
  bool accepted = false;
  std::string seed_profile;
  int mp_iterations = 0;
  int newton_iterations = 0;
  std::vector<double> newton_history;  // max(residual_u, residual_v) after each accepted step
  std::vector<Candidate> candidates;
  std::vector<std::string> warnings;
};

// Recomputes every diagnostic of (u, v) and the acceptance flag.
void evaluate_pair(SolutionPair& sp, const ReducedFunctional& rf, const SolverOptions& opts);

// Initial guesses: "radial" (r-R) e^{-(r-R)} (R_out-r)/(R_out-R), "cosK" the
// same profile times cos^K(theta).
Field seed_profile(const GridPtr& grid, const std::string& name);

SolutionPair mountain_pass_solve(const WeightPair& wp, const ExponentPair& ep,
                                 const SolverOptions& opts = {});

// Damped Newton on the coupled residual over interior nodes. Throws
// NonConvergenceError if accept_tol is not reached.
SolutionPair coupled_refine(const SolutionPair& seed, const WeightPair& wp, const ExponentPair& ep,
                            const SolverOptions& opts = {});

// Homotopy from (min(p, c0), min(q, c0)), c0 = (2 + 2N/(N-2))/2, to the target.
// On step underflow the last converged pair is returned with accepted = false.
SolutionPair continuation_solve(const WeightPair& wp, const ExponentPair& target, int steps,
                                const SolverOptions& opts = {});

struct SweepEntry {
  int m = 0;
  int n = 0;
  std::optional<SolutionPair> solution;
  std::string error;
};

struct DistinctnessResult {
  std::string verdict;  // "distinct" | "radial-coincidence" | "inconclusive"
  double distance = 0.0;
  double radiality_1 = 0.0;
  double radiality_2 = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  // one per pair (a, b) of converged entries, a < b
  std::vector<std::pair<std::pair<int, int>, DistinctnessResult>> distinctness;
};

// One solve per n in {2, ..., k}, m = N - n, on grids sharing R, R_out, n_r,
// n_theta with `base`. Decompositions run on up to `threads` threads; each
// uses continuation_solve with that many steps when continuation_steps > 0.
SweepResult multiplicity_sweep(const DomainSpec& base, double p, double q, int k,
                               const std::string& weights, const SolverOptions& opts = {},
                               int threads = 1, int continuation_steps = 0);

// theta-average along each radius, weighted by cos^{m-1} sin^{n-1}
std::vector<double> radial_average(const Field& u);

double radiality_measure(const Field& u);

DistinctnessResult distinctness_check(const SolutionPair& s1, const SolutionPair& s2, double tol);

}  // namespace hamsys
