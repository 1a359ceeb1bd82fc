#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hamsys/domain.hpp"
#include "hamsys/functional.hpp"
#include "hamsys/solver.hpp"

namespace hamsys::experiment {

// One documented configuration key. The table of all keys is the single
// source for defaults, parsing and the generated reference page.
struct KeySpec {
  const char* section;
  const char* key;
  const char* fallback;
  const char* description;
};

const std::vector<KeySpec>& config_keys();

// Markdown reference of every key with its default.
std::string config_reference();

struct RunConfig {
  DomainSpec domain;
  double p = 0.0;
  double q = 0.0;
  std::string weights = "ones";
  SolverOptions solver;
  bool continuation = false;
  int continuation_steps = 4;
  std::vector<std::string> tasks;
  int sweep_k = 2;
  double hardy_step = 1e-3;
  double hardy_tol = 1e-10;
  bool hardy_check_2d = true;
  int hardy_2d_n_r = 257;
  int hardy_2d_n_theta = 9;
  std::filesystem::path output_dir = "out";
  // resolved key -> value text, used for hashing and echoed into reports
  std::map<std::string, std::string> resolved;
};

// Reads an INI file ([section] key = value), applies "section.key=value"
// overrides, fills defaults and validates. Throws ValidationError naming the
// offending key or invariant.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::filesystem::path& base_dir = ".");

// SHA-256 (hex) of the resolved configuration, excluding the output directory.
std::string config_hash(const RunConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool hard = true;
};

// Residuals, positivity, cone, energy, round trips, Szulkin slack, pointwise
// comparison, Rayleigh bound and radiality of a pair, in a fixed order.
std::vector<Check> check_solution(const Field& u, const Field& v, const WeightPair& wp, const ExponentPair& ep,
                                  const SolverOptions& opts);

// CSV with header r,theta,u,v and 17 significant digits.
void write_fields(const std::filesystem::path& path, const Field& u, const Field& v);

struct LoadedFields {
  Field u;
  Field v;
};

// Rebuilds the grid from the file using (N, m, n) of `spec`; R and R_out must
// match `spec`, the resolutions are taken from the file.
LoadedFields read_fields(const std::filesystem::path& path, const DomainSpec& spec);

enum ExitCode : int { kOk = 0, kValidation = 1, kNonConvergence = 2, kInvariant = 3 };

struct RunOutcome {
  int exit_code = kOk;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;
};

// Executes cfg.tasks in order, writing <task>.json, field CSVs and summary.txt
// into cfg.output_dir. Reports contain no timestamps.
RunOutcome run(const RunConfig& cfg, int threads = 1);

// Re-runs every check on saved fields and writes verify.json.
RunOutcome verify(const std::vector<std::filesystem::path>& files, const RunConfig& cfg);

}  // namespace hamsys::experiment
