#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "chasm/grid.hpp"
#include "chasm/spline.hpp"
#include "chasm/workers.hpp"

namespace chasm {

enum class SingularPolicy { None, ZeroAtSingularity, GridShift };

/**
 * Potential V(x) with its singular points and the rule used when an
 * evaluation lands on one.
 */
class Potential {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  Potential() = default;
  explicit Potential(Fn fn, std::vector<std::vector<double>> singular_points = {});

  /// V = m omega |x - center|^2 / 2.
  static Potential harmonic(double mass, double omega, std::vector<double> center = {});
  /// V = -strength / |x|, singular at the origin.
  static Potential coulomb(double strength = 1.0);
  /// V = -strength / sqrt(|x|^2 + eps^2).
  static Potential mollified_coulomb(double eps, double strength = 1.0);
  static Potential constant(double c);

  Potential& with_policy(SingularPolicy policy, double delta_x = 0.0);
  SingularPolicy policy() const { return policy_; }
  double delta_x() const { return delta_x_; }
  const std::vector<std::vector<double>>& singular_points() const { return singular_; }

  /// Evaluation with the singular policy applied.
  double operator()(std::span<const double> x) const;
  /// V(x + y/2) - V(x - y/2).
  double symbol(std::span<const double> x, std::span<const double> y) const;

  bool is_quadratic() const { return static_cast<bool>(gradient_); }
  /// grad V; only quadratic potentials carry one.
  void gradient(std::span<const double> x, std::span<double> out) const;

 private:
  Fn fn_;
  GradFn gradient_;
  std::vector<std::vector<double>> singular_;
  SingularPolicy policy_ = SingularPolicy::None;
  double delta_x_ = 0.0;
};

/**
 * D_V(x_i, y_n) for every grid position and every dual node y_n = pi n / L_k.
 * Columns follow FFT bin order on each k axis (bin b is n = b for b < N/2,
 * n = b - N otherwise); the table is row-major, one row per x point.
 */
struct SymbolTable {
  std::vector<std::size_t> k_shape;
  std::vector<double> half_length;  // L_k per axis
  RowMajorArray<double> d_v;
  double hbar = 1.0;

  std::size_t x_points() const { return static_cast<std::size_t>(d_v.rows()); }
  std::size_t k_points() const { return static_cast<std::size_t>(d_v.cols()); }
  /// Dual index n of FFT bin `bin` on k axis `axis`.
  long dual_index(std::size_t axis, std::size_t bin) const;
};

/// Builds the symbol table, evaluating V under its singular policy.
SymbolTable apply_singular_policy(const Potential& V, const PhaseGrid& grid);

/// Theta_V[f] by the pseudo-spectral method, real part of the result.
Eigen::ArrayXd psm_apply(const Eigen::ArrayXd& f, const SymbolTable& symbols,
                         const PhaseGrid& grid, WorkerPool* pool = nullptr);
/// Same transform without discarding the imaginary part (realness diagnostics).
Eigen::ArrayXcd psm_apply_complex(const Eigen::ArrayXd& f, const SymbolTable& symbols,
                                  const PhaseGrid& grid);
/// Theta_V on one k slice (f over the k grid at x point `x_index`).
std::vector<double> psm_apply_slice(std::span<const double> f_slice, std::size_t x_index,
                                    const SymbolTable& symbols);

/// Direct double-sum discretization of the convolution form; tiny grids only.
Eigen::ArrayXd quadrature_oracle(const Eigen::ArrayXd& f, const Potential& V,
                                 const PhaseGrid& grid);

/// (1/hbar) grad V . grad_k f with the spectral k derivative; quadratic V only.
Eigen::ArrayXd local_gradient_apply(const Eigen::ArrayXd& f, const Potential& V,
                                    const PhaseGrid& grid);

/// Callable Theta_V with a cached symbol table and per-worker FFT workspaces.
class PsmOperator {
 public:
  PsmOperator(const PhaseGrid& grid, const Potential& V, WorkerPool* pool = nullptr);
  void operator()(const Eigen::ArrayXd& f, Eigen::ArrayXd& out) const;
  const SymbolTable& symbols() const { return table_; }

 private:
  PhaseGrid grid_;
  SymbolTable table_;
  WorkerPool* pool_;
};

}  // namespace chasm
