#include "chasm/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "chasm/errors.hpp"
#include "chasm/ndfft.hpp"

namespace chasm {

using std::numbers::pi;

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::SineSpline: return "sine";
    case ProblemKind::FreeAdvection2D: return "free_advection";
    case ProblemKind::Harmonic2D: return "harmonic";
    case ProblemKind::Hydrogen1s: return "hydrogen";
  }
  return "?";
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "sine") return ProblemKind::SineSpline;
  if (name == "free_advection") return ProblemKind::FreeAdvection2D;
  if (name == "harmonic") return ProblemKind::Harmonic2D;
  if (name == "hydrogen") return ProblemKind::Hydrogen1s;
  throw ConfigError("unknown problem '" + name +
                    "' (expected sine, free_advection, harmonic or hydrogen)");
}

ProblemSpec ProblemSpec::defaults(ProblemKind kind) {
  ProblemSpec s;
  s.kind = kind;
  auto& p = s.params;
  p["hbar"] = 1.0;
  p["mass"] = 1.0;
  switch (kind) {
    case ProblemKind::SineSpline:
      p["x_lo"] = 0.0;
      p["x_hi"] = 8.0;
      break;
    case ProblemKind::FreeAdvection2D:
      p["a"] = 1.0;
      p["k0"] = 0.5;
      p["x_lo"] = -12.0;
      p["x_hi"] = 12.0;
      p["k_lo"] = -6.0;
      p["k_hi"] = 6.0;
      p["tau"] = 0.05;
      p["t_final"] = 5.0;
      break;
    case ProblemKind::Harmonic2D:
      p["omega"] = (pi / 5.0) * (pi / 5.0);
      p["x_A"] = 1.0;
      p["x_lo"] = -12.0;
      p["x_hi"] = 12.0;
      p["k_lo"] = -6.4;
      p["k_hi"] = 6.4;
      p["tau"] = 1e-4;
      p["t_final"] = 2.0;
      break;
    case ProblemKind::Hydrogen1s:
      p["x_lo"] = -12.0;
      p["x_hi"] = 12.0;
      p["k_lo"] = -6.4;
      p["k_hi"] = 6.4;
      p["tau"] = 0.01;
      p["t_final"] = 0.01;
      break;
  }
  return s;
}

double ProblemSpec::get(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end())
    throw ConfigError("problem '" + to_string(kind) + "' is missing parameter '" + name + "'");
  return it->second;
}

void ProblemSpec::validate() const {
  for (const char* key : {"hbar", "mass", "x_lo", "x_hi"}) (void)get(key);
  if (!(get("hbar") > 0) || !(get("mass") > 0)) throw ConfigError("hbar and mass must be positive");
  if (!(get("x_hi") > get("x_lo"))) throw ConfigError("x_hi must exceed x_lo");
  if (kind == ProblemKind::SineSpline) return;
  if (!(get("k_hi") > get("k_lo"))) throw ConfigError("k_hi must exceed k_lo");
  if (!(get("tau") > 0) || !(get("t_final") > 0))
    throw ConfigError("tau and t_final must be positive");
  if (kind == ProblemKind::FreeAdvection2D && !(get("a") > 0))
    throw ConfigError("Gaussian width a must be positive");
  if (kind == ProblemKind::Harmonic2D && !(get("omega") > 0))
    throw ConfigError("harmonic problem needs omega > 0");
}

double free_gaussian_exact(double x, double k, double t, double a, double k0, double hbar,
                           double m) {
  const double z = x - hbar * k * t / m;
  return std::exp(-z * z / (2 * a * a) - 2 * a * a * (k - k0) * (k - k0)) / pi;
}

RotatedPoint harmonic_characteristic(double x, double k, double t, double omega, double hbar,
                                     double m) {
  const double w = std::sqrt(omega);
  const double c = std::cos(w * t), s = std::sin(w * t);
  return {c * x - hbar / (m * w) * s * k, m * w / hbar * s * x + c * k};
}

double harmonic_initial(double x, double k, double x0) {
  return std::exp(-(x - x0) * (x - x0) / 2 - 2 * k * k) / pi;
}

double initial_gaussian_6d(std::span<const double> x, std::span<const double> k) {
  const double r2 = (x[0] - 1) * (x[0] - 1) + x[1] * x[1] + x[2] * x[2];
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  return std::exp(-r2 / 2 - 2 * k2) / (pi * pi * pi);
}

double hydrogen_1s_orbital(std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return std::exp(-std::sqrt(r2)) / (2 * std::sqrt(2.0) * pi * pi);
}

StateField hydrogen_1s_wigner(const PhaseGrid& grid, std::size_t n_y) {
  if (grid.dim() != 3) throw ConfigError("1s Wigner function needs a 3+3 grid");
  if (n_y < 2 || (n_y & (n_y - 1)) != 0)
    throw ConfigError("n_y must be a power of two, got " + std::to_string(n_y));
  constexpr std::size_t guard = 10000000;
  if (grid.size() > guard)
    throw SizeError("1s generator refuses grids above " + std::to_string(guard) +
                    " points (got " + std::to_string(grid.size()) + ")");
  std::vector<std::size_t> k_shape;
  std::array<double, 3> dy{};
  for (std::size_t a = 0; a < 3; ++a) {
    const auto& k = grid.k_axes[a];
    if (!k.is_periodic()) throw ConfigError("1s generator needs periodic k axes");
    const double half = static_cast<double>(k.n_points() / 2) * k.spacing();
    if (std::abs(k.lo() + half) > 1e-9 * half)
      throw ConfigError("1s generator needs k axes symmetric about 0");
    k_shape.push_back(k.n_points());
    dy[a] = 2 * pi / (static_cast<double>(k.n_points()) * k.spacing());
  }
  const std::size_t K = grid.k_size();
  const long half_y = static_cast<long>(n_y / 2);
  const double cell = dy[0] * dy[1] * dy[2];

  StateField out(grid);
  std::vector<std::complex<double>> folded(K);
  NdFft fft;
  double x[3], minus[3], plus[3];
  const std::size_t nx1 = grid.x_axes[1].n_points(), nx2 = grid.x_axes[2].n_points();
  for (std::size_t r = 0; r < grid.x_size(); ++r) {
    x[0] = grid.x_axes[0][r / (nx1 * nx2)];
    x[1] = grid.x_axes[1][(r / nx2) % nx1];
    x[2] = grid.x_axes[2][r % nx2];
    std::fill(folded.begin(), folded.end(), 0.0);
    for (long e0 = -half_y; e0 < half_y; ++e0)
      for (long e1 = -half_y; e1 < half_y; ++e1)
        for (long e2 = -half_y; e2 < half_y; ++e2) {
          const long e[3] = {e0, e1, e2};
          std::size_t bin = 0;
          for (std::size_t a = 0; a < 3; ++a) {
            const double off = 0.5 * static_cast<double>(e[a]) * dy[a];
            minus[a] = x[a] - off;
            plus[a] = x[a] + off;
            const auto n = static_cast<long>(k_shape[a]);
            bin = bin * k_shape[a] + static_cast<std::size_t>(((e[a] % n) + n) % n);
          }
          folded[bin] += hydrogen_1s_orbital(minus) * hydrogen_1s_orbital(plus);
        }
    // sum_eta g(eta) exp(-2 pi i zeta.eta / N_k) is the forward DFT at bin zeta mod N_k
    fft.forward(folded, k_shape);
    std::size_t c = 0;
    for (std::size_t j0 = 0; j0 < k_shape[0]; ++j0)
      for (std::size_t j1 = 0; j1 < k_shape[1]; ++j1)
        for (std::size_t j2 = 0; j2 < k_shape[2]; ++j2, ++c) {
          const std::size_t j[3] = {j0, j1, j2};
          std::size_t bin = 0;
          for (std::size_t a = 0; a < 3; ++a) {
            const std::size_t n = k_shape[a];
            // grid index j sits at zeta = j - n/2
            bin = bin * n + (j[a] + n - n / 2) % n;
          }
          out.values[static_cast<Eigen::Index>(r * K + c)] = folded[bin].real() * cell;
        }
  }
  return out;
}

std::vector<double> sine_samples(const Axis<double>& axis) {
  std::vector<double> s(axis.n_points());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(axis[i]);
  return s;
}

}  // namespace chasm
