#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "chasm/errors.hpp"
#include "chasm/harness.hpp"

namespace chasm {

RunConfig default_config(ProblemKind kind) {
  RunConfig c;
  c.problem = ProblemSpec::defaults(kind);
  switch (kind) {
    case ProblemKind::SineSpline:
      c.n_x = 161;
      c.n_k = 2;
      c.bc = BoundaryCondition::neumann();
      break;
    case ProblemKind::FreeAdvection2D:
      c.n_x = 81;
      c.n_k = 81;
      c.bc = BoundaryCondition::neumann();
      break;
    case ProblemKind::Harmonic2D:
      c.dx = 0.1;
      c.n_k = 64;
      c.bc = BoundaryCondition::natural();
      break;
    case ProblemKind::Hydrogen1s:
      c.n_x = 9;
      c.n_k = 8;
      c.bc = BoundaryCondition::natural();
      c.output_stride = 1;
      break;
  }
  return c;
}

namespace {

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out))
    throw ConfigError("setting '" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_real(key, v);
  if (d < 0 || d != std::floor(d) || d > 1e12)
    throw ConfigError("setting '" + key + "' expects a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("setting '" + key + "' expects true or false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ClosureKind parse_closure(const std::string& v) {
  if (v == "serial") return ClosureKind::Serial;
  if (v == "clshbc") return ClosureKind::ClsHbc;
  if (v == "pmbc") return ClosureKind::Pmbc;
  throw ConfigError("unknown closure '" + v + "' (expected serial, clshbc or pmbc)");
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "problem") {
    c = default_config(parse_problem(v));
  } else if (key == "scheme") {
    c.scheme = parse_scheme(v);
  } else if (key == "closure") {
    c.closure.kind = parse_closure(v);
  } else if (key == "nnb") {
    c.closure.n_nb = to_count(key, v);
  } else if (key == "patches") {
    c.closure.patches = to_count(key, v);
  } else if (key == "workers") {
    c.workers = to_count(key, v);
  } else if (key == "nx") {
    c.n_x = to_count(key, v);
    c.dx.reset();
  } else if (key == "nk") {
    c.n_k = to_count(key, v);
    c.dk.reset();
  } else if (key == "dx") {
    c.dx = to_real(key, v);
  } else if (key == "dk") {
    c.dk = to_real(key, v);
  } else if (key == "bc") {
    if (v == "neumann")
      c.bc = BoundaryCondition::neumann();
    else if (v == "natural")
      c.bc = BoundaryCondition::natural();
    else if (v == "clamped")
      c.bc = BoundaryCondition::clamped(0.0, 0.0);
    else
      throw ConfigError("unknown boundary condition '" + v +
                        "' (expected neumann, natural or clamped)");
  } else if (key == "theta") {
    if (v != "psm" && v != "gradient")
      throw ConfigError("unknown theta path '" + v + "' (expected psm or gradient)");
    c.theta = v;
  } else if (key == "policy") {
    if (v == "none")
      c.policy = SingularPolicy::None;
    else if (v == "zero")
      c.policy = SingularPolicy::ZeroAtSingularity;
    else if (v == "shift")
      c.policy = SingularPolicy::GridShift;
    else
      throw ConfigError("unknown singular policy '" + v + "' (expected none, zero or shift)");
  } else if (key == "delta_x") {
    c.delta_x = to_real(key, v);
  } else if (key == "n_y") {
    c.n_y = to_count(key, v);
  } else if (key == "output_stride") {
    c.output_stride = to_count(key, v);
  } else if (key == "blowup_factor") {
    c.blowup_factor = to_real(key, v);
  } else if (key == "out") {
    c.output_path = v;
  } else if (key == "allow_heavy") {
    c.allow_heavy = to_bool(key, v);
  } else if (key == "tau" || key == "t_final" || key == "hbar" || key == "mass" || key == "a" ||
             key == "k0" || key == "omega" || key == "x_A" || key == "x_lo" || key == "x_hi" ||
             key == "k_lo" || key == "k_hi") {
    c.problem.params[key] = to_real(key, v);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  RunConfig c;
  for (const auto& [k, v] : entries)
    if (k == "problem") apply_setting(c, k, v);
  for (const auto& [k, v] : entries) {
    if (k == "problem") continue;
    try {
      apply_setting(c, k, v);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

namespace {

std::size_t points_from_spacing(double length, double spacing, bool periodic,
                                const std::string& name) {
  if (!(spacing > 0)) throw ConfigError(name + " must be positive");
  const double intervals = length / spacing;
  const double n = std::round(intervals);
  if (n < 1 || std::abs(n - intervals) > 1e-9 * std::max(1.0, intervals))
    throw ConfigError(name + " = " + std::to_string(spacing) +
                      " does not divide the domain length " + std::to_string(length));
  return static_cast<std::size_t>(n) + (periodic ? 0 : 1);
}

}  // namespace

PhaseGrid build_grid(const RunConfig& c) {
  const auto& p = c.problem;
  const double xl = p.get("x_lo"), xh = p.get("x_hi");
  const std::size_t nx = c.dx ? points_from_spacing(xh - xl, *c.dx, false, "dx") : c.n_x;
  const auto x = Axis<double>::node_centered(xl, xh, nx);
  if (p.kind == ProblemKind::SineSpline)
    return PhaseGrid({x}, {Axis<double>::node_centered(0.0, 1.0, 2)}, p.get("hbar"), p.get("mass"));

  const double kl = p.get("k_lo"), kh = p.get("k_hi");
  const bool periodic = p.kind != ProblemKind::FreeAdvection2D;
  const std::size_t nk = c.dk ? points_from_spacing(kh - kl, *c.dk, periodic, "dk") : c.n_k;
  const auto k = periodic ? Axis<double>::periodic(kl, kh, nk) : Axis<double>::node_centered(kl, kh, nk);
  if (p.kind == ProblemKind::Hydrogen1s)
    return PhaseGrid({x, x, x}, {k, k, k}, p.get("hbar"), p.get("mass"));
  return PhaseGrid({x}, {k}, p.get("hbar"), p.get("mass"));
}

void validate(const RunConfig& c) {
  c.problem.validate();
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.closure.patches < 1) throw ConfigError("patches must be >= 1");
  if (c.closure.kind == ClosureKind::Serial && c.closure.patches != 1)
    throw ConfigError("closure=serial needs patches=1 (got " + std::to_string(c.closure.patches) +
                      ")");
  if (!(c.blowup_factor > 1)) throw ConfigError("blowup_factor must exceed 1");
  if (c.theta == "gradient" && c.problem.kind != ProblemKind::Harmonic2D)
    throw ConfigError("theta=gradient is only available for the harmonic problem");
  if (c.bc.kind == BoundaryCondition::Kind::Clamped && c.problem.kind != ProblemKind::SineSpline)
    throw ConfigError("bc=clamped is only available for the sine problem");
  const PhaseGrid grid = build_grid(c);
  for (const auto& a : grid.x_axes) (void)make_patch_layout(a.n_points(), c.closure.patches);
  if (c.problem.kind == ProblemKind::SineSpline) return;
  const double steps = c.t_final() / c.tau();
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("t_final = " + std::to_string(c.t_final()) +
                      " is not a whole number of steps of tau = " + std::to_string(c.tau()));
}

}  // namespace chasm
