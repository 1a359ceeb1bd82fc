#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hamsys/errors.hpp"
#include "hamsys/experiment.hpp"

namespace hamsys::experiment {

void write_fields(const std::filesystem::path& path, const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = *u.grid;
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot write '" + path.string() + "'");
  std::fputs("r,theta,u,v\n", f);
  for (std::size_t i = 0; i < g.nr; ++i)
    for (std::size_t j = 0; j < g.nt; ++j)
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", g.r[i], g.theta[j], u(i, j), v(i, j));
  if (std::fclose(f) != 0) throw Error("error writing '" + path.string() + "'");
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

LoadedFields read_fields(const std::filesystem::path& path, const DomainSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open field file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,theta,u,v") throw ValidationError("'" + path.string() + "': expected header r,theta,u,v");

  std::vector<std::array<double, 4>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::array<double, 4> row{};
    const char* p = line.c_str();
    for (int c = 0; c < 4; ++c) {
      char* end = nullptr;
      row[c] = std::strtod(p, &end);
      if (end == p) throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
      p = end;
      if (c < 3) {
        if (*p != ',') throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
        ++p;
      }
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError("'" + path.string() + "' has no data rows");

  std::size_t nt = 0;
  while (nt < rows.size() && close(rows[nt][0], rows[0][0])) ++nt;
  if (nt < 3 || rows.size() % nt != 0)
    throw GridMismatchError("'" + path.string() + "' is not a full tensor grid");
  const std::size_t nr = rows.size() / nt;

  DomainSpec s = spec;
  s.n_r = static_cast<int>(nr);
  s.n_theta = static_cast<int>(nt);
  if (!close(rows.front()[0], spec.R) || !close(rows.back()[0], spec.R_out))
    throw GridMismatchError("'" + path.string() + "' spans r in [" + std::to_string(rows.front()[0]) + ", " +
                            std::to_string(rows.back()[0]) + "], configuration has [" + std::to_string(spec.R) +
                            ", " + std::to_string(spec.R_out) + "]");
  s.validate();
  const GridPtr grid = build_grid(s);
  LoadedFields out{Field(grid), Field(grid)};
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const auto& row = rows[i * nt + j];
      if (!close(row[0], grid->r[i]) || !close(row[1], grid->theta[j]))
        throw GridMismatchError("'" + path.string() + "': node (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") does not lie on a uniform grid");
      out.u(i, j) = row[2];
      out.v(i, j) = row[3];
    }
  return out;
}

}  // namespace hamsys::experiment
