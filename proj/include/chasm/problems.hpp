#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "chasm/field.hpp"
#include "chasm/grid.hpp"

namespace chasm {

enum class ProblemKind { SineSpline, FreeAdvection2D, Harmonic2D, Hydrogen1s };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem(const std::string& name);

/// Problem kind plus named real parameters, with per-kind defaults.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::FreeAdvection2D;
  std::map<std::string, double> params;

  static ProblemSpec defaults(ProblemKind kind);
  double get(const std::string& name) const;
  /// Throws ConfigError when a required parameter is missing or out of range.
  void validate() const;
};

/// (1/pi) exp(-(x - hbar k t/m)^2 / (2a^2) - 2a^2 (k - k0)^2).
double free_gaussian_exact(double x, double k, double t, double a, double k0, double hbar,
                           double m);

/// Backward characteristic of the harmonic oscillator at time t.
struct RotatedPoint {
  double x;
  double k;
};
RotatedPoint harmonic_characteristic(double x, double k, double t, double omega, double hbar,
                                     double m);

/// f0 evaluated at the backward characteristic; exact for V = m omega x^2 / 2.
template <typename F0>
double harmonic_exact(double x, double k, double t, double omega, double hbar, double m,
                      const F0& f0) {
  const auto p = harmonic_characteristic(x, k, t, omega, hbar, m);
  return f0(p.x, p.k);
}

/// pi^{-1} exp(-(x - x0)^2 / 2 - 2 k^2), the harmonic test initial state.
double harmonic_initial(double x, double k, double x0 = 1.0);

/// pi^{-3} exp(-((x1 - 1)^2 + x2^2 + x3^2)/2 - 2|k|^2).
double initial_gaussian_6d(std::span<const double> x, std::span<const double> k);

/// phi_1s(x) = exp(-|x|) / (2 sqrt(2) pi^2).
double hydrogen_1s_orbital(std::span<const double> x);

/**
 * 1s Wigner function on a 3+3 grid by the discrete transform over
 * n_y^3 offsets with dy = 2 pi / (N_k dk), folded onto the N_k^3 FFT.
 */
StateField hydrogen_1s_wigner(const PhaseGrid& grid, std::size_t n_y);

/// sin(x_i) on the nodes of `axis` (1-D spline test).
std::vector<double> sine_samples(const Axis<double>& axis);

}  // namespace chasm
