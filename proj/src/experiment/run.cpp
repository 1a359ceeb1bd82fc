#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "hamsys/errors.hpp"
#include "hamsys/experiment.hpp"
#include "hamsys/kernels.hpp"
#include "hamsys/spectral.hpp"

namespace hamsys::experiment {

using json = nlohmann::ordered_json;

std::vector<Check> check_solution(const Field& u, const Field& v, const WeightPair& wp, const ExponentPair& ep,
                                  const SolverOptions& opts) {
  require_same_grid(u, v);
  require_same_grid(u, wp.a);
  const HelmholtzSystem sys(u.grid);
  const ReducedFunctional rf(sys, wp, ep);
  SolutionPair sp;
  sp.u = u;
  sp.v = v;
  evaluate_pair(sp, rf, opts);

  const double tol = opts.accept_tol;
  const bool unit_weights = wp.name == "ones";
  std::vector<Check> out;
  auto add = [&](std::string name, double value, double threshold, bool pass, bool hard) {
    out.push_back({std::move(name), value, threshold, pass && std::isfinite(value), hard});
  };
  auto amplitude = [](const Field& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return std::max(1.0, m);
  };

  add("residual_u", sp.residual_u, tol, sp.residual_u <= tol, true);
  add("residual_v", sp.residual_v, tol, sp.residual_v <= tol, true);
  add("positivity", sp.positivity_margin, 0.0, sp.positivity_margin > 0.0, true);
  const double cu = std::max(sp.cone_u.negativity, sp.cone_u.monotonicity) / amplitude(u);
  const double cv = std::max(sp.cone_v.negativity, sp.cone_v.monotonicity) / amplitude(v);
  add("cone_u", cu, tol, cu <= tol, true);
  add("cone_v", cv, tol, cv <= tol, true);
  add("energy", sp.energy, 0.0, sp.energy > 0.0, true);
  add("roundtrip_u", sp.roundtrip_u_error, 10.0 * tol, sp.roundtrip_u_error <= 10.0 * tol, true);
  add("roundtrip_v", sp.roundtrip_error, 10.0 * tol, sp.roundtrip_error <= 10.0 * tol, false);
  add("invariance", sp.invariance_error, 10.0 * tol, sp.invariance_error <= 10.0 * tol, false);

  if (sp.positivity_margin > 0.0) {
    const auto dirs = cone_directions(u, opts.szulkin_trials, opts.szulkin_delta, opts.seed);
    const SzulkinReport sz = rf.szulkin_check(u, dirs, tol);
    add("szulkin_slack", sz.min_slack, -tol, sz.min_slack >= -tol, true);

    const ComparisonReport cmp = comparison_check(u, v, ep, tol);
    const double cmp_tol = tol * std::max(1.0, cmp.scale);
    add("comparison", cmp.min_value, -cmp_tol, cmp.min_value >= -cmp_tol, unit_weights);

    const RayleighReport ray = rayleigh_bound_check(u, v, ep);
    add("rayleigh", ray.quotient, ray.bound * (1.0 + 1e-3), ray.pass, unit_weights);
  } else {
    add("szulkin_slack", NAN, -tol, false, true);
    add("comparison", NAN, 0.0, false, unit_weights);
    add("rayleigh", NAN, 0.0, false, unit_weights);
  }
  add("radiality", sp.radiality, opts.radial_tol, true, false);
  return out;
}

namespace {

json grid_json(const DomainSpec& s) {
  return {{"N", s.N}, {"m", s.m}, {"n", s.n}, {"R", s.R}, {"R_out", s.R_out}, {"n_r", s.n_r},
          {"n_theta", s.n_theta}};
}

json provenance(const RunConfig& cfg, const DomainSpec& grid) {
  json cfgj = json::object();
  for (const auto& [k, v] : cfg.resolved)
    if (k != "output.dir") cfgj[k] = v;
  return {{"config_hash", config_hash(cfg)},
          {"seed", cfg.solver.seed},
          {"grid", grid_json(grid)},
          {"simd", std::string(kernels::isa_name(kernels::active().isa))},
          {"config", cfgj}};
}

json cone_json(const ConeReport& c) {
  return {{"negativity", c.negativity}, {"monotonicity", c.monotonicity}, {"member", c.member}};
}

json pair_json(const SolutionPair& sp) {
  json cands = json::array();
  for (const Candidate& c : sp.candidates)
    cands.push_back({{"profile", c.profile},
                     {"path_max", c.path_max},
                     {"energy", c.energy},
                     {"radiality", c.radiality},
                     {"iterations", c.iterations},
                     {"accepted", c.accepted},
                     {"note", c.note}});
  return {{"m", sp.m},
          {"n", sp.n},
          {"p", sp.p},
          {"q", sp.q},
          {"accepted", sp.accepted},
          {"energy", sp.energy},
          {"psi", sp.psi},
          {"phi", sp.phi},
          {"residual_u", sp.residual_u},
          {"residual_v", sp.residual_v},
          {"positivity_margin", sp.positivity_margin},
          {"cone_u", cone_json(sp.cone_u)},
          {"cone_v", cone_json(sp.cone_v)},
          {"roundtrip_error", sp.roundtrip_error},
          {"roundtrip_u_error", sp.roundtrip_u_error},
          {"invariance_error", sp.invariance_error},
          {"radiality", sp.radiality},
          {"seed_profile", sp.seed_profile},
          {"mp_iterations", sp.mp_iterations},
          {"newton_iterations", sp.newton_iterations},
          {"newton_history", sp.newton_history},
          {"candidates", cands},
          {"warnings", sp.warnings}};
}

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks)
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass},
                   {"hard", c.hard}});
  return arr;
}

json exponents_json(const ExponentPair& ep) {
  return {{"p", ep.p},         {"q", ep.q},
          {"p_conj", ep.p_conj}, {"q_conj", ep.q_conj},
          {"supercritical", ep.supercritical}, {"window_ok", ep.window_ok}};
}

bool hard_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.hard; });
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Context {
 public:
  Context(const RunConfig& cfg, RunOutcome& out) : cfg_(cfg), out_(out) {
    std::filesystem::create_directories(cfg.output_dir);
  }

  void raise(int code) {
    if (code == kOk) return;
    if (out_.exit_code == kOk || code < out_.exit_code) out_.exit_code = code;
  }

  void fail(const std::string& task, const std::string& what, int code) {
    out_.failures.push_back(task + ": " + what);
    raise(code);
  }

  void warn(const std::string& task, const std::string& what) { out_.warnings.push_back(task + ": " + what); }

  void row(const std::string& task, const std::string& quantity, const std::string& value,
           const std::string& status) {
    rows_.push_back({task, quantity, value, status});
  }

  void checks_rows(const std::string& task, const std::vector<Check>& checks) {
    for (const Check& c : checks)
      row(task, c.name, fmt(c.value), c.pass ? "pass" : (c.hard ? "FAIL" : "soft-fail"));
  }

  std::filesystem::path artifact(const std::string& name) {
    const auto path = cfg_.output_dir / name;
    out_.artifacts.push_back(path);
    return path;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f(artifact(name));
    f << j.dump(2) << '\n';
    if (!f) throw Error("cannot write '" + name + "'");
  }

  void write_summary() {
    std::size_t w[3] = {4, 8, 5};
    for (const auto& r : rows_) {
      w[0] = std::max(w[0], r[0].size());
      w[1] = std::max(w[1], r[1].size());
      w[2] = std::max(w[2], r[2].size());
    }
    std::ofstream f(artifact("summary.txt"));
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
      f << a << std::string(w[0] - a.size() + 2, ' ') << b << std::string(w[1] - b.size() + 2, ' ') << c
        << std::string(w[2] - c.size() + 2, ' ') << d << '\n';
    };
    line("task", "quantity", "value", "status");
    line(std::string(w[0], '-'), std::string(w[1], '-'), std::string(w[2], '-'), "------");
    for (const auto& r : rows_) line(r[0], r[1], r[2], r[3]);
    for (const auto& s : out_.warnings) f << "warning: " << s << '\n';
    for (const auto& s : out_.failures) f << "failure: " << s << '\n';
    f << "exit code: " << out_.exit_code << '\n';
  }

 private:
  const RunConfig& cfg_;
  RunOutcome& out_;
  std::vector<std::array<std::string, 4>> rows_;
};

SolutionPair solve_pair(const RunConfig& cfg, const WeightPair& wp, const ExponentPair& ep,
                        const SolverOptions& opts) {
  return cfg.continuation ? continuation_solve(wp, ep, cfg.continuation_steps, opts)
                          : mountain_pass_solve(wp, ep, opts);
}

void task_solve(const RunConfig& cfg, Context& ctx, std::optional<SolutionPair>& solved) {
  const GridPtr grid = build_grid(cfg.domain);
  const WeightPair wp = make_weights(cfg.weights, grid);
  const ExponentPair ep = ExponentPair::make(cfg.p, cfg.q, cfg.domain.N, cfg.domain.n);
  SolutionPair sp = solve_pair(cfg, wp, ep, cfg.solver);
  const std::vector<Check> checks = check_solution(sp.u, sp.v, wp, ep, cfg.solver);
  write_fields(ctx.artifact("solution.csv"), sp.u, sp.v);
  const WeightReport wr = validate_weights(wp, 1e-12);
  json j;
  j["task"] = "solve";
  j["provenance"] = provenance(cfg, cfg.domain);
  j["exponents"] = exponents_json(ep);
  j["weights"] = {{"name", wp.name}, {"min_a", wr.min_a}, {"max_a", wr.max_a},
                  {"min_b", wr.min_b}, {"max_b", wr.max_b}, {"pass", wr.pass}};
  j["solution"] = pair_json(sp);
  j["checks"] = checks_json(checks);
  j["fields"] = "solution.csv";
  j["pass"] = sp.accepted && hard_pass(checks);
  ctx.write_json("solve.json", j);

  ctx.row("solve", "energy", fmt(sp.energy), sp.accepted ? "accepted" : "rejected");
  ctx.checks_rows("solve", checks);
  for (const auto& w : sp.warnings) ctx.warn("solve", w);
  if (!sp.accepted) ctx.fail("solve", "best candidate failed the acceptance checks", kNonConvergence);
  if (!hard_pass(checks)) ctx.fail("solve", "hard invariant failed", kInvariant);
  solved = std::move(sp);
}

void task_sweep(const RunConfig& cfg, Context& ctx, int threads) {
  const SweepResult res = multiplicity_sweep(cfg.domain, cfg.p, cfg.q, cfg.sweep_k, cfg.weights, cfg.solver,
                                             threads, cfg.continuation ? cfg.continuation_steps : 0);
  json entries = json::array();
  for (const SweepEntry& e : res.entries) {
    json je = {{"m", e.m}, {"n", e.n}};
    const std::string tag = "sweep (" + std::to_string(e.m) + "," + std::to_string(e.n) + ")";
    if (e.solution) {
      const SolutionPair& sp = *e.solution;
      const WeightPair wp = make_weights(cfg.weights, sp.u.grid);
      const ExponentPair ep = ExponentPair::make(cfg.p, cfg.q, cfg.domain.N, e.n);
      const std::vector<Check> checks = check_solution(sp.u, sp.v, wp, ep, cfg.solver);
      const std::string file = "sweep_m" + std::to_string(e.m) + "_n" + std::to_string(e.n) + ".csv";
      write_fields(ctx.artifact(file), sp.u, sp.v);
      je["exponents"] = exponents_json(ep);
      je["solution"] = pair_json(sp);
      je["checks"] = checks_json(checks);
      je["fields"] = file;
      ctx.row(tag, "energy", fmt(sp.energy), sp.accepted ? "accepted" : "rejected");
      ctx.row(tag, "radiality", fmt(sp.radiality), "");
      ctx.checks_rows(tag, checks);
      for (const auto& w : sp.warnings) ctx.warn(tag, w);
      if (!hard_pass(checks)) ctx.fail(tag, "hard invariant failed", kInvariant);
    }
    je["error"] = e.error;
    if (!e.error.empty()) ctx.fail(tag, e.error, kNonConvergence);
    entries.push_back(je);
  }
  json dist = json::array();
  for (const auto& [key, d] : res.distinctness) {
    dist.push_back({{"n_a", key.first},
                    {"n_b", key.second},
                    {"verdict", d.verdict},
                    {"distance", d.distance},
                    {"radiality_a", d.radiality_1},
                    {"radiality_b", d.radiality_2}});
    ctx.row("sweep", "n=" + std::to_string(key.first) + " vs n=" + std::to_string(key.second), fmt(d.distance),
            d.verdict);
    if (d.verdict != "distinct")
      ctx.warn("sweep", "decompositions n=" + std::to_string(key.first) + " and n=" + std::to_string(key.second) +
                            " gave verdict " + d.verdict);
  }
  json j;
  j["task"] = "sweep";
  j["provenance"] = provenance(cfg, cfg.domain);
  j["k"] = cfg.sweep_k;
  j["entries"] = entries;
  j["distinctness"] = dist;
  ctx.write_json("sweep.json", j);
}

void task_spectrum(const RunConfig& cfg, Context& ctx, std::optional<SolutionPair>& solved) {
  if (cfg.weights != "ones") throw ValidationError("spectrum: requires weights.preset = ones");
  const GridPtr grid = build_grid(cfg.domain);
  const WeightPair wp = make_weights(cfg.weights, grid);
  const ExponentPair ep = ExponentPair::make(cfg.p, cfg.q, cfg.domain.N, cfg.domain.n);
  const HardyReport hardy = hardy_constant(cfg.domain, cfg.hardy_tol, cfg.hardy_step);

  SolverOptions ro = cfg.solver;
  ro.radial_only = true;
  const SolutionPair radial = mountain_pass_solve(wp, ep, ro);
  if (!radial.accepted) throw NonConvergenceError("spectrum: radial candidate not accepted", radial.residual_u);
  const SpectralReport rep = spectral_report(radial, ep, hardy.estimate);
  if (!solved) solved = solve_pair(cfg, wp, ep, cfg.solver);
  const SymmetryVerdict verdict = symmetry_verdict(*solved, rep, cfg.solver.radial_tol);

  std::vector<Check> checks;
  const double gscale = std::max(std::abs(rep.second_variation), std::abs(rep.second_variation_closed));
  const double gdiff = std::abs(rep.second_variation - rep.second_variation_closed);
  checks.push_back({"second_variation_agreement", gscale > 0.0 ? gdiff / gscale : 0.0, 1e-6,
                    gdiff <= 1e-6 * gscale, true});
  const double closed_sign = (ep.p_conj - 1.0) * rep.lambda1 * rep.lambda1 - (ep.q - 1.0);
  const bool same_sign = (rep.second_variation > 0.0) == (closed_sign > 0.0) &&
                         (rep.second_variation_closed > 0.0) == (closed_sign > 0.0);
  checks.push_back({"second_variation_sign", closed_sign, 0.0, same_sign, true});
  checks.push_back({"hardy_lower_bound", hardy.estimate, hardy.lower_bound - 1e-8,
                    hardy.estimate >= hardy.lower_bound - 1e-8, true});
  const double bound = std::sqrt(ep.q / ep.p) * (1.0 + 1e-3);
  checks.push_back({"rayleigh", rep.rayleigh_quotient, bound, rep.rayleigh_quotient <= bound, true});
  checks.push_back({"symmetry_consistency", solved->radiality, cfg.solver.radial_tol, !verdict.discrepancy, false});

  json phi = json::array();
  for (std::size_t i = 0; i < grid->nr; ++i) phi.push_back({{"r", grid->r[i]}, {"phi", rep.phi[i]}});
  json j;
  j["task"] = "spectrum";
  j["provenance"] = provenance(cfg, cfg.domain);
  j["exponents"] = exponents_json(ep);
  j["report"] = {{"hardy_constant", rep.hardy_constant},
                 {"lambda1", rep.lambda1},
                 {"mu1", rep.mu1},
                 {"mu1_residual", rep.mu1_residual},
                 {"criterion_lhs", rep.criterion_lhs},
                 {"criterion_rhs", rep.criterion_rhs},
                 {"second_variation", rep.second_variation},
                 {"second_variation_closed", rep.second_variation_closed},
                 {"rayleigh_quotient", rep.rayleigh_quotient},
                 {"verdict", rep.verdict ? "yes" : "no"}};
  j["symmetry"] = {{"predicted", verdict.predicted},
                   {"observed", verdict.observed},
                   {"discrepancy", verdict.discrepancy},
                   {"label", verdict.label},
                   {"radiality", solved->radiality}};
  j["radial_candidate"] = pair_json(radial);
  j["solution"] = pair_json(*solved);
  j["checks"] = checks_json(checks);
  j["phi"] = phi;
  j["pass"] = hard_pass(checks);
  ctx.write_json("spectrum.json", j);

  ctx.row("spectrum", "hardy_constant", fmt(rep.hardy_constant), "");
  ctx.row("spectrum", "lambda1", fmt(rep.lambda1), "");
  ctx.row("spectrum", "criterion", fmt(rep.criterion_lhs) + " vs " + fmt(rep.criterion_rhs),
          rep.verdict ? "predicted" : "not-predicted");
  ctx.row("spectrum", "second_variation", fmt(rep.second_variation), "");
  ctx.row("spectrum", "symmetry", fmt(solved->radiality), verdict.label);
  ctx.checks_rows("spectrum", checks);
  if (verdict.discrepancy)
    ctx.warn("spectrum", "symmetry breaking predicted but the solution is radial (radiality " +
                             fmt(solved->radiality) + ")");
  if (!hard_pass(checks)) ctx.fail("spectrum", "hard invariant failed", kInvariant);
}

void task_hardy(const RunConfig& cfg, Context& ctx) {
  const HardyReport rep = hardy_constant(cfg.domain, cfg.hardy_tol, cfg.hardy_step);
  std::vector<Check> checks;
  checks.push_back({"lower_bound", rep.estimate, rep.lower_bound - 1e-8, rep.estimate >= rep.lower_bound - 1e-8,
                    true});
  bool monotone = true;
  for (std::size_t k = 1; k < rep.values.size(); ++k) monotone = monotone && rep.values[k] <= rep.values[k - 1];
  checks.push_back({"truncation_monotone", rep.values.back(), rep.values.front(), monotone, true});
  checks.push_back({"extrapolation_gap", rep.extrapolation_gap, 1e-3 * rep.estimate,
                    rep.extrapolation_gap <= 1e-3 * rep.estimate, true});
  json j;
  j["task"] = "hardy";
  j["provenance"] = provenance(cfg, cfg.domain);
  j["estimate"] = rep.estimate;
  j["lower_bound"] = rep.lower_bound;
  j["step"] = rep.step;
  json tr = json::array();
  for (std::size_t k = 0; k < rep.values.size(); ++k)
    tr.push_back({{"truncation", rep.truncations[k]}, {"value", rep.values[k]}});
  j["truncations"] = tr;
  j["extrapolation_gap"] = rep.extrapolation_gap;
  if (cfg.hardy_check_2d) {
    DomainSpec s = cfg.domain;
    s.R_out = 10.0 * s.R;
    s.n_r = cfg.hardy_2d_n_r;
    s.n_theta = cfg.hardy_2d_n_theta;
    const double two_d = hardy_reduced_2d(s);
    const double one_d = hardy_radial_at(s.N, 10.0, cfg.hardy_step);
    const double rel = std::abs(two_d - one_d) / one_d;
    checks.push_back({"cross_check_2d", rel, 1e-2, rel <= 1e-2, true});
    j["cross_check_2d"] = {{"grid", grid_json(s)}, {"value_2d", two_d}, {"value_1d", one_d}, {"relative", rel}};
  }
  j["checks"] = checks_json(checks);
  j["pass"] = hard_pass(checks);
  ctx.write_json("hardy.json", j);
  ctx.row("hardy", "estimate", fmt(rep.estimate), "");
  ctx.checks_rows("hardy", checks);
  if (!hard_pass(checks)) ctx.fail("hardy", "hard invariant failed", kInvariant);
}

json verify_files(const std::vector<std::filesystem::path>& files, const RunConfig& cfg, Context& ctx) {
  json list = json::array();
  for (const auto& file : files) {
    const LoadedFields lf = read_fields(file, cfg.domain);
    const DomainSpec& s = lf.u.grid->spec;
    const WeightPair wp = make_weights(cfg.weights, lf.u.grid);
    const ExponentPair ep = ExponentPair::make(cfg.p, cfg.q, s.N, s.n);
    const std::vector<Check> checks = check_solution(lf.u, lf.v, wp, ep, cfg.solver);
    const std::string name = file.filename().string();
    list.push_back({{"file", name}, {"grid", grid_json(s)}, {"checks", checks_json(checks)},
                    {"pass", hard_pass(checks)}});
    ctx.checks_rows("verify " + name, checks);
    if (!hard_pass(checks)) ctx.fail("verify " + name, "hard invariant failed", kInvariant);
  }
  return list;
}

void write_verify(const RunConfig& cfg, Context& ctx, const json& list) {
  bool all = true;
  for (const auto& e : list) all = all && e["pass"].get<bool>();
  json j;
  j["task"] = "verify";
  j["provenance"] = provenance(cfg, cfg.domain);
  j["files"] = list;
  j["pass"] = all;
  ctx.write_json("verify.json", j);
}

template <class F>
void guarded(const std::string& task, Context& ctx, F&& body) {
  try {
    body();
  } catch (const ValidationError& e) {
    ctx.fail(task, e.what(), kValidation);
  } catch (const NonConvergenceError& e) {
    ctx.fail(task, e.what(), kNonConvergence);
  } catch (const InvariantError& e) {
    ctx.fail(task, e.what(), kInvariant);
  } catch (const DegenerateDirectionError& e) {
    ctx.fail(task, e.what(), kNonConvergence);
  }
}

}  // namespace

RunOutcome run(const RunConfig& cfg, int threads) {
  if (threads < 1) throw ValidationError("threads must be at least 1");
  RunOutcome out;
  Context ctx(cfg, out);
  std::optional<SolutionPair> solved;
  for (const std::string& task : cfg.tasks) {
    guarded(task, ctx, [&] {
      if (task == "solve") {
        task_solve(cfg, ctx, solved);
      } else if (task == "sweep") {
        task_sweep(cfg, ctx, threads);
      } else if (task == "spectrum") {
        task_spectrum(cfg, ctx, solved);
      } else if (task == "hardy") {
        task_hardy(cfg, ctx);
      } else if (task == "verify") {
        const auto file = cfg.output_dir / "solution.csv";
        if (!std::filesystem::exists(file))
          throw ValidationError("verify: '" + file.string() + "' does not exist; run the solve task first");
        write_verify(cfg, ctx, verify_files({file}, cfg, ctx));
      } else {
        throw ValidationError("unknown task '" + task + "'");
      }
    });
  }
  ctx.write_summary();
  return out;
}

RunOutcome verify(const std::vector<std::filesystem::path>& files, const RunConfig& cfg) {
  if (files.empty()) throw ValidationError("verify: no files given");
  RunOutcome out;
  Context ctx(cfg, out);
  guarded("verify", ctx, [&] { write_verify(cfg, ctx, verify_files(files, cfg, ctx)); });
  ctx.write_summary();
  return out;
}

}  // namespace hamsys::experiment
