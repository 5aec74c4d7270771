#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "chasm/field.hpp"
#include "chasm/grid.hpp"
#include "chasm/par_spline.hpp"
#include "chasm/workers.hpp"

namespace chasm {

struct AdvectionOptions {
  BoundaryCondition bc = BoundaryCondition::neumann();
  ClosureConfig closure{};
  std::size_t workers = 1;
};

/**
 * Free-transport shift f -> f(x - hbar k tau / m, k) on a PhaseGrid.
 *
 * Each x axis is handled in turn: lines along it are splined (serially or
 * per patch) and evaluated at the feet of the characteristics. Feet outside
 * the axis get 0. Many fields can be shifted in one sweep.
 */
class Advector {
 public:
  struct Counters {
    std::size_t sweeps = 0;    // shift() calls
    std::size_t fields = 0;    // fields shifted
    std::size_t messages = 0;  // junction packets exchanged
  };

  Advector(const PhaseGrid& grid, AdvectionOptions options = {});

  const PhaseGrid& grid() const { return grid_; }
  const AdvectionOptions& options() const { return options_; }
  WorkerPool& pool() { return *pool_; }
  const Counters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

  /// out[i] = in[i] shifted by A_tau; out may alias in.
  void shift(std::span<const Eigen::ArrayXd* const> in, std::span<Eigen::ArrayXd* const> out,
             double tau);
  Eigen::ArrayXd shifted(const Eigen::ArrayXd& f, double tau);

 private:
  void shift_axis(const Eigen::ArrayXd& in, Eigen::ArrayXd& out, std::size_t axis, double tau);

  PhaseGrid grid_;
  AdvectionOptions options_;
  std::vector<PatchedLineSolver> solvers_;
  std::unique_ptr<WorkerPool> pool_;
  WorkerPool inline_pool_{1};
  Counters counters_;
};

/// f composed with A_tau, time advanced by tau.
StateField advect(const StateField& f, double tau, Advector& advector);

}  // namespace chasm
