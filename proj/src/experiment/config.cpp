#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hamsys/errors.hpp"
#include "hamsys/experiment.hpp"

namespace hamsys::experiment {

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"domain", "N", "5", "total dimension N = m + n, N > 3"},
      {"domain", "m", "3", "dimension of the first block, n <= m"},
      {"domain", "n", "2", "dimension of the second block, n > 1"},
      {"domain", "R", "1", "inner radius R > 0"},
      {"domain", "R_out", "10", "truncation radius R_out > R (Dirichlet boundary)"},
      {"domain", "n_r", "129", "radial grid points, >= 3"},
      {"domain", "n_theta", "65", "angular grid points on [0, pi/2], >= 3"},
      {"exponents", "p", "3.2", "exponent p > 2"},
      {"exponents", "q", "3.2", "exponent q >= p"},
      {"weights", "preset", "ones", "`ones`, `s-squared`, or the path of a CSV table with header r,theta,a,b"},
      {"solver", "accept_tol", "1e-8", "relative residual accepted for a solution pair"},
      {"solver", "cg_tol", "1e-10", "relative residual of each linear solve"},
      {"solver", "path_points", "33", "points on the discretized mountain-pass path"},
      {"solver", "mp_max_iter", "300", "maximum deformation steps of the path stage"},
      {"solver", "mp_grad_tol", "1e-5", "relative preconditioned gradient ending the path stage"},
      {"solver", "newton_max_iter", "40", "maximum damped Newton steps"},
      {"solver", "seed", "12345", "seed of every randomized direction"},
      {"solver", "seed_profiles", "radial,cos2,cos8", "initial guesses: radial or cosK (bump times cos^K theta)"},
      {"solver", "szulkin_trials", "50", "cone directions sampled by the criticality check"},
      {"solver", "szulkin_delta", "1e-3", "relative size of the sampled cone perturbations"},
      {"solver", "radial_tol", "1e-3", "radiality measure above which a field counts as non-radial"},
      {"solver", "allow_outside_window", "true", "run (with a warning) when (p, q) is outside the existence window"},
      {"solver", "continuation", "false", "reach (p, q) by continuation from a subcritical pair"},
      {"solver", "continuation_steps", "4", "initial number of continuation steps"},
      {"tasks", "list", "solve", "comma list from solve, sweep, spectrum, verify, hardy"},
      {"sweep", "k", "2", "largest n of the multiplicity sweep, 2 <= k <= N/2"},
      {"hardy", "step", "1e-3", "mesh width in log(r / R) of the radial Hardy problem"},
      {"hardy", "tol", "1e-10", "relative eigenvalue change ending inverse iteration"},
      {"hardy", "check_2d", "true", "corroborate with the 2-D grid at truncation 10R"},
      {"hardy", "n_r_2d", "257", "radial points of the 2-D corroboration grid"},
      {"hardy", "n_theta_2d", "9", "angular points of the 2-D corroboration grid"},
      {"output", "dir", "out", "directory receiving reports and field dumps"},
  };
  return keys;
}

std::string config_reference() {
  std::ostringstream os;
  os << "# Configuration reference\n\n"
     << "Run configurations are INI files: `[section]` headers followed by `key = value` lines.\n"
     << "Lines starting with `;` or `#` are comments. Any key can be overridden on the command line\n"
     << "with `--override section.key=value`. Unknown sections or keys are rejected.\n";
  std::string section;
  for (const KeySpec& k : config_keys()) {
    if (section != k.section) {
      section = k.section;
      os << "\n## [" << section << "]\n\n| key | default | meaning |\n|---|---|---|\n";
    }
    os << "| `" << k.key << "` | `" << k.fallback << "` | " << k.description << " |\n";
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ValidationError("config key '" + key + "': " + what + " (got '" + value + "')");
}

template <class T>
T convert(const std::map<std::string, std::string>& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  std::istringstream is(text);
  T out{};
  is >> out;
  if (!is || !(is >> std::ws).eof()) bad_value(key, text, "not a valid number");
  return out;
}

bool convert_bool(const std::map<std::string, std::string>& kv, const std::string& key) {
  const std::string& t = kv.at(key);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, t, "expected true or false");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir) {
  std::ostringstream cleaned;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t[0] == '#') continue;
      cleaned << line << '\n';
    }
  }
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(cleaned.str());
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  std::set<std::string> known;
  std::map<std::string, std::string> kv;
  for (const KeySpec& k : config_keys()) {
    const std::string full = std::string(k.section) + "." + k.key;
    known.insert(full);
    kv[full] = k.fallback;
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ValidationError("config: key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.count(full)) throw ValidationError("config: unknown key '" + full + "'");
      kv[full] = trim(value.data());
    }
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + ov + "' is not of the form section.key=value");
    const std::string full = trim(ov.substr(0, eq));
    if (!known.count(full)) throw ValidationError("override: unknown key '" + full + "'");
    kv[full] = trim(ov.substr(eq + 1));
  }

  RunConfig cfg;
  cfg.domain.N = convert<int>(kv, "domain.N");
  cfg.domain.m = convert<int>(kv, "domain.m");
  cfg.domain.n = convert<int>(kv, "domain.n");
  cfg.domain.R = convert<double>(kv, "domain.R");
  cfg.domain.R_out = convert<double>(kv, "domain.R_out");
  cfg.domain.n_r = convert<int>(kv, "domain.n_r");
  cfg.domain.n_theta = convert<int>(kv, "domain.n_theta");
  cfg.domain.validate();

  cfg.p = convert<double>(kv, "exponents.p");
  cfg.q = convert<double>(kv, "exponents.q");
  ExponentPair::make(cfg.p, cfg.q, cfg.domain.N, cfg.domain.n);

  cfg.weights = kv.at("weights.preset");
  if (cfg.weights != "ones" && cfg.weights != "s-squared") {
    std::filesystem::path wpath(cfg.weights);
    if (wpath.is_relative()) wpath = base_dir / wpath;
    if (!std::filesystem::exists(wpath))
      throw ValidationError("config key 'weights.preset': weight table '" + wpath.string() + "' does not exist");
    cfg.weights = wpath.string();
  }

  SolverOptions& so = cfg.solver;
  so.accept_tol = convert<double>(kv, "solver.accept_tol");
  so.cg_tol = convert<double>(kv, "solver.cg_tol");
  so.path_points = convert<int>(kv, "solver.path_points");
  so.mp_max_iter = convert<int>(kv, "solver.mp_max_iter");
  so.mp_grad_tol = convert<double>(kv, "solver.mp_grad_tol");
  so.newton_max_iter = convert<int>(kv, "solver.newton_max_iter");
  so.seed = convert<std::uint64_t>(kv, "solver.seed");
  so.seed_profiles = split_list(kv.at("solver.seed_profiles"));
  so.szulkin_trials = convert<std::size_t>(kv, "solver.szulkin_trials");
  so.szulkin_delta = convert<double>(kv, "solver.szulkin_delta");
  so.radial_tol = convert<double>(kv, "solver.radial_tol");
  so.allow_outside_window = convert_bool(kv, "solver.allow_outside_window");
  cfg.continuation = convert_bool(kv, "solver.continuation");
  cfg.continuation_steps = convert<int>(kv, "solver.continuation_steps");
  if (!(so.accept_tol > 0.0)) bad_value("solver.accept_tol", kv["solver.accept_tol"], "must be positive");
  if (!(so.cg_tol > 0.0)) bad_value("solver.cg_tol", kv["solver.cg_tol"], "must be positive");
  if (so.path_points < 3) bad_value("solver.path_points", kv["solver.path_points"], "must be at least 3");
  if (so.seed_profiles.empty()) bad_value("solver.seed_profiles", kv["solver.seed_profiles"], "must not be empty");
  if (cfg.continuation_steps < 1)
    bad_value("solver.continuation_steps", kv["solver.continuation_steps"], "must be at least 1");

  static const std::set<std::string> task_names = {"solve", "sweep", "spectrum", "verify", "hardy"};
  cfg.tasks = split_list(kv.at("tasks.list"));
  if (cfg.tasks.empty()) throw ValidationError("config key 'tasks.list': task list is empty");
  for (const std::string& t : cfg.tasks)
    if (!task_names.count(t)) bad_value("tasks.list", t, "unknown task");

  cfg.sweep_k = convert<int>(kv, "sweep.k");
  if (std::find(cfg.tasks.begin(), cfg.tasks.end(), "sweep") != cfg.tasks.end() &&
      (cfg.sweep_k < 2 || cfg.sweep_k > cfg.domain.N / 2))
    bad_value("sweep.k", kv["sweep.k"], "2 <= k <= floor(N/2) violated");
  cfg.hardy_step = convert<double>(kv, "hardy.step");
  cfg.hardy_tol = convert<double>(kv, "hardy.tol");
  cfg.hardy_check_2d = convert_bool(kv, "hardy.check_2d");
  cfg.hardy_2d_n_r = convert<int>(kv, "hardy.n_r_2d");
  cfg.hardy_2d_n_theta = convert<int>(kv, "hardy.n_theta_2d");
  if (!(cfg.hardy_step > 0.0)) bad_value("hardy.step", kv["hardy.step"], "must be positive");
  cfg.output_dir = kv.at("output.dir");
  cfg.resolved = std::move(kv);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path.parent_path().empty() ? "." : path.parent_path());
}

std::string config_hash(const RunConfig& cfg) {
  std::string canon;
  for (const auto& [k, v] : cfg.resolved) {
    if (k == "output.dir") continue;
    canon += k + "=" + v + "\n";
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canon.data(), canon.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("config_hash: SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace hamsys::experiment
