#include "chasm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "chasm/advection.hpp"
#include "chasm/errors.hpp"

namespace chasm {

namespace {

constexpr double kHeavyCost = 2e10;

long step_count(const RunConfig& c) { return std::lround(c.t_final() / c.tau()); }

void write_csv(const RunConfig& c, const ErrorSeries& series) {
  if (c.output_path.empty()) return;
  std::ofstream out(c.output_path);
  if (!out) throw ConfigError("cannot write output file '" + c.output_path + "'");
  out << format_csv(series);
}

/// Reference solution at time t, sampled on the grid.
Eigen::ArrayXd reference(const RunConfig& c, const PhaseGrid& grid, const StateField& f0,
                         double t) {
  const auto& p = c.problem;
  const double hbar = p.get("hbar"), m = p.get("mass");
  switch (p.kind) {
    case ProblemKind::FreeAdvection2D: {
      const double a = p.get("a"), k0 = p.get("k0");
      return sample_field(grid, [&](auto x, auto k) {
               return free_gaussian_exact(x[0], k[0], t, a, k0, hbar, m);
             }).values;
    }
    case ProblemKind::Harmonic2D: {
      const double omega = p.get("omega"), xa = p.get("x_A");
      const auto f0fn = [&](double x, double k) { return harmonic_initial(x, k, xa); };
      return sample_field(grid, [&](auto x, auto k) {
               return harmonic_exact(x[0], k[0], t, omega, hbar, m, f0fn);
             }).values;
    }
    default:
      return f0.values;
  }
}

StateField initial_state(const RunConfig& c, const PhaseGrid& grid) {
  const auto& p = c.problem;
  switch (p.kind) {
    case ProblemKind::Hydrogen1s:
      return hydrogen_1s_wigner(grid, c.n_y);
    default: {
      StateField f(grid);
      f.values = reference(c, grid, f, 0.0);
      return f;
    }
  }
}

ThetaOp make_theta(const RunConfig& c, const PhaseGrid& grid, Advector& adv,
                   std::shared_ptr<PsmOperator>& keep) {
  const auto& p = c.problem;
  switch (p.kind) {
    case ProblemKind::Harmonic2D: {
      const Potential V = Potential::harmonic(p.get("mass"), p.get("omega"));
      if (c.theta == "gradient")
        return [V, grid](const Eigen::ArrayXd& f, Eigen::ArrayXd& out) {
          out = local_gradient_apply(f, V, grid);
        };
      keep = std::make_shared<PsmOperator>(grid, V, &adv.pool());
      break;
    }
    case ProblemKind::Hydrogen1s: {
      Potential V = Potential::coulomb();
      V.with_policy(c.policy, c.delta_x);
      keep = std::make_shared<PsmOperator>(grid, V, &adv.pool());
      break;
    }
    default:
      return {};
  }
  return [op = keep](const Eigen::ArrayXd& f, Eigen::ArrayXd& out) { (*op)(f, out); };
}

/// Patched spline of sin(x) against the global spline with the same end conditions.
RunResult run_sine(const RunConfig& c) {
  const PhaseGrid grid = build_grid(c);
  const auto& axis = grid.x_axes[0];
  BoundaryCondition bc = c.bc;
  if (bc.kind == BoundaryCondition::Kind::Clamped)
    bc = BoundaryCondition::clamped(std::cos(axis.lo()), std::cos(axis.hi()));
  const auto samples = sine_samples(axis);
  const PatchedSpline s = exchange_and_solve(samples, axis, bc, c.closure, c.workers);
  const auto global = solve_coeffs<double>(samples, bc, axis);
  const auto dev = coefficient_deviation(s, global);
  CompensatedSum sq;
  for (double d : dev) sq.add(d * d);
  RunResult r;
  r.series.append(0.0, std::sqrt(sq.value() * axis.spacing()),
                  *std::max_element(dev.begin(), dev.end()), 0.0, 0.0);
  r.sweeps = 1;
  write_csv(c, r.series);
  return r;
}

}  // namespace

RunResult run_experiment(const RunConfig& c) {
  validate(c);
  if (estimated_cost(c) > kHeavyCost && !c.allow_heavy) {
    std::ostringstream msg;
    msg << "run needs about " << std::setprecision(3) << estimated_cost(c)
        << " point updates; set allow_heavy=true to run it anyway";
    throw ConfigError(msg.str());
  }
  if (c.problem.kind == ProblemKind::SineSpline) return run_sine(c);

  const PhaseGrid grid = build_grid(c);
  AdvectionOptions opts{c.bc, c.closure, c.workers};
  Advector adv(grid, opts);
  std::shared_ptr<PsmOperator> psm;
  const ThetaOp theta = make_theta(c, grid, adv, psm);

  StateField f = initial_state(c, grid);
  const StateField f0 = f;
  const double f0_max = f0.values.abs().maxCoeff();
  const double tau = c.tau();
  const long steps = step_count(c);
  const long stride =
      c.output_stride > 0 ? static_cast<long>(c.output_stride) : std::max(1L, (steps + 49) / 50);

  RunResult r;
  const auto record = [&](double t) {
    const Eigen::ArrayXd ref = reference(c, grid, f0, t);
    r.series.append(t, eps_2(f.values, ref, grid), eps_inf(f.values, ref),
                    eps_mass(f.values, f0.values, grid), min_marginal(f.values, grid));
  };
  record(0.0);

  Integrator integrator(c.scheme, adv, theta, tau);
  for (long s = 1; s <= steps; ++s) {
    integrator.step(f);
    const double t = static_cast<double>(s) * tau;
    f.time = t;
    r.steps = s;
    const bool finite = f.all_finite();
    if (!finite || f.values.abs().maxCoeff() > c.blowup_factor * f0_max) {
      if (finite) record(t);
      write_csv(c, r.series);
      std::ostringstream msg;
      msg << to_string(c.scheme) << " went unstable at step " << s << " (t = " << t << "): "
          << (finite ? "max|f| exceeded blowup_factor * max|f0|" : "non-finite values");
      throw InstabilityError(msg.str(), s, t);
    }
    if (s % stride == 0 || s == steps) record(t);
  }
  r.sweeps = adv.counters().sweeps;
  r.theta_evals = integrator.counters().theta_evals;
  write_csv(c, r.series);
  return r;
}

std::string format_csv(const ErrorSeries& s) {
  std::ostringstream out;
  out << "t,eps_inf,eps_2,eps_mass,min_marginal\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i)
    out << s.times[i] << ',' << s.eps_inf[i] << ',' << s.eps2[i] << ',' << s.eps_mass[i] << ','
        << s.min_marginal[i] << '\n';
  return out.str();
}

double fitted_order(const std::vector<double>& params, const std::vector<double>& errors) {
  if (params.size() != errors.size() || params.size() < 2)
    throw SizeError("fitted_order needs at least two (parameter, error) pairs");
  const auto n = static_cast<double>(params.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0) || !(errors[i] > 0))
      throw ConfigError("fitted_order needs positive parameters and errors");
    const double x = std::log(params[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) throw ConfigError("fitted_order needs distinct parameters");
  return (n * sxy - sx * sy) / den;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<double>& params,
                                              const std::vector<double>& einf,
                                              const std::vector<double>& e2) {
  if (params.size() != einf.size() || params.size() != e2.size())
    throw SizeError("convergence_table inputs differ in length");
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < params.size(); ++i) {
    ConvergenceRow row{params[i], einf[i], e2[i], std::nullopt};
    if (i > 0)
      row.order = fitted_order({params.begin(), params.begin() + static_cast<long>(i) + 1},
                               {einf.begin(), einf.begin() + static_cast<long>(i) + 1});
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_table(const std::vector<RunConfig>& configs,
                                              const std::string& vary) {
  if (vary != "dx" && vary != "nnb" && vary != "nk")
    throw ConfigError("cannot vary '" + vary + "' (expected dx, nnb or nk)");
  std::vector<double> params, einf, e2;
  for (const auto& c : configs) {
    const RunResult r = run_experiment(c);
    const PhaseGrid g = build_grid(c);
    if (vary == "dx")
      params.push_back(g.x_axes[0].spacing());
    else if (vary == "nnb")
      params.push_back(static_cast<double>(c.closure.n_nb));
    else
      params.push_back(static_cast<double>(g.k_axes[0].n_points()));
    einf.push_back(r.series.eps_inf.back());
    e2.push_back(r.series.eps2.back());
  }
  return convergence_table(params, einf, e2);
}

double estimated_cost(const RunConfig& c) {
  const PhaseGrid g = build_grid(c);
  const auto n = static_cast<double>(g.size());
  if (c.problem.kind == ProblemKind::SineSpline) return n;
  const double steps = std::round(c.t_final() / c.tau());
  const double per_step = c.scheme == Scheme::OS ? 2.0 : 3.0;
  double cost = steps * per_step * n * static_cast<double>(g.dim());
  if (c.problem.kind == ProblemKind::Hydrogen1s) {
    const auto ny = static_cast<double>(c.n_y);
    cost += static_cast<double>(g.x_size()) * ny * ny * ny;
  }
  return cost;
}

}  // namespace chasm
