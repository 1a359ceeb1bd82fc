#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hamsys/errors.hpp"
#include "hamsys/experiment.hpp"

namespace ex = hamsys::experiment;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string seed;
  int threads = 1;
  std::vector<std::string> overrides;
};

ex::RunConfig build_config(const Common& c, const std::string& tasks) {
  std::vector<std::string> ov = c.overrides;
  if (!c.out.empty()) ov.push_back("output.dir=" + c.out);
  if (!c.seed.empty()) ov.push_back("solver.seed=" + c.seed);
  if (!tasks.empty()) ov.push_back("tasks.list=" + tasks);
  if (c.config.empty()) return ex::parse_config("", ov);
  return ex::load_config(c.config, ov);
}

int report(const ex::RunOutcome& out) {
  for (const auto& p : out.artifacts)
    if (p.filename() == "summary.txt") {
      std::ifstream f(p);
      std::cout << f.rdbuf();
    }
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : out.failures) std::cerr << "error: " << f << '\n';
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced Hamiltonian elliptic systems on annular domains: solver and diagnostics"};
  app.require_subcommand(1);
  Common c;
  app.add_option("-c,--config", c.config, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("-o,--out", c.out, "output directory (overrides output.dir)");
  app.add_option("--seed", c.seed, "random seed (overrides solver.seed)");
  app.add_option("-j,--threads", c.threads, "worker threads for the multiplicity sweep")
      ->check(CLI::PositiveNumber);
  app.add_option("-O,--override", c.overrides, "section.key=value, repeatable");
  app.fallthrough();

  std::vector<std::string> files;
  auto* solve = app.add_subcommand("solve", "mountain-pass solve with Newton refinement");
  auto* sweep = app.add_subcommand("sweep", "multiplicity sweep over the decompositions n = 2..k");
  auto* spectrum = app.add_subcommand("spectrum", "spectral report and symmetry verdict");
  auto* hardy = app.add_subcommand("hardy", "Hardy constant of the annulus");
  auto* verify = app.add_subcommand("verify", "re-run every check on saved fields");
  verify->add_option("files", files, "CSV field files (default <out>/solution.csv)")->check(CLI::ExistingFile);
  auto* run = app.add_subcommand("run", "run the task list of the configuration");
  auto* ref = app.add_subcommand("config-reference", "print the configuration reference as markdown");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ref->parsed()) {
      std::cout << ex::config_reference();
      return 0;
    }
    if (verify->parsed()) {
      const ex::RunConfig cfg = build_config(c, "verify");
      if (files.empty()) files.push_back((cfg.output_dir / "solution.csv").string());
      std::vector<std::filesystem::path> paths(files.begin(), files.end());
      return report(ex::verify(paths, cfg));
    }
    std::string tasks;
    if (solve->parsed()) tasks = "solve";
    if (sweep->parsed()) tasks = "sweep";
    if (spectrum->parsed()) tasks = "spectrum";
    if (hardy->parsed()) tasks = "hardy";
    (void)run;
    return report(ex::run(build_config(c, tasks), c.threads));
  } catch (const hamsys::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return ex::kValidation;
  } catch (const hamsys::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return ex::kNonConvergence;
  } catch (const hamsys::InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return ex::kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::kValidation;
  }
}
