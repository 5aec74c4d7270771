#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chasm/integrators.hpp"
#include "chasm/metrics.hpp"
#include "chasm/par_spline.hpp"
#include "chasm/problems.hpp"
#include "chasm/psido.hpp"

namespace chasm {

struct RunConfig {
  ProblemSpec problem = ProblemSpec::defaults(ProblemKind::FreeAdvection2D);
  Scheme scheme = Scheme::LPC1;
  ClosureConfig closure{};
  BoundaryCondition bc = BoundaryCondition::neumann();
  std::size_t workers = 1;
  std::size_t n_x = 81;
  std::size_t n_k = 81;
  std::optional<double> dx;  // overrides n_x when set
  std::optional<double> dk;  // overrides n_k when set
  std::string theta = "psm";  // psm | gradient (harmonic only)
  SingularPolicy policy = SingularPolicy::ZeroAtSingularity;
  double delta_x = 0.0;
  std::size_t n_y = 64;
  std::size_t output_stride = 0;  // steps between CSV rows; 0 picks about 50 rows
  double blowup_factor = 10.0;
  std::string output_path;
  bool allow_heavy = false;

  double tau() const { return problem.get("tau"); }
  double t_final() const { return problem.get("t_final"); }
};

/// Defaults for one problem kind (grid, closure, boundary condition, scheme).
RunConfig default_config(ProblemKind kind);

/// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses flat key=value text ('#' starts a comment). `problem` is applied first.
RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Checks ranges and combinations; throws ConfigError.
void validate(const RunConfig& config);

/// Grid implied by the config (1+1 for the 2-D problems, 3+3 for hydrogen).
PhaseGrid build_grid(const RunConfig& config);

struct RunResult {
  ErrorSeries series;
  long steps = 0;
  std::size_t sweeps = 0;
  std::size_t theta_evals = 0;
};

/**
 * Runs one experiment and writes the CSV (when output_path is set).
 * Non-finite values or growth past blowup_factor * max|f0| abort with
 * InstabilityError after the rows gathered so far are written.
 */
RunResult run_experiment(const RunConfig& config);

/// CSV text: header t,eps_inf,eps_2,eps_mass,min_marginal and 17-digit rows.
std::string format_csv(const ErrorSeries& series);

struct ConvergenceRow {
  double parameter = 0.0;
  double eps_inf = 0.0;
  double eps_2 = 0.0;
  std::optional<double> order;  // least-squares slope over this and all earlier rows
};

/// Least-squares slope of log(error) against log(parameter).
double fitted_order(const std::vector<double>& parameters, const std::vector<double>& errors);

std::vector<ConvergenceRow> convergence_table(const std::vector<double>& parameters,
                                              const std::vector<double>& eps_inf,
                                              const std::vector<double>& eps_2);

/// Runs every config and tabulates final errors against `vary` (dx, nnb or nk).
std::vector<ConvergenceRow> convergence_table(const std::vector<RunConfig>& configs,
                                              const std::string& vary);

/// Rough cost of a run in grid-point updates, for the heavy-mode notice.
double estimated_cost(const RunConfig& config);

}  // namespace chasm
