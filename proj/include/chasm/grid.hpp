#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "chasm/errors.hpp"

namespace chasm {

/**
 * Uniform 1-D axis.
 *
 * Node-centered axes include both endpoints: point i is lo + i*spacing and
 * point n_points-1 is hi. Periodic axes cover [lo, hi) with the right
 * endpoint excluded; they are the momentum grids used by the spectral
 * operator and require an even point count.
 */
template <typename Scalar = double>
class Axis {
 public:
  Axis() = default;

  static Axis node_centered(Scalar lo, Scalar hi, std::size_t n_points) {
    if (n_points < 2) throw ConfigError("axis needs at least 2 points");
    if (!(hi > lo)) throw ConfigError("axis requires lo < hi");
    return Axis(lo, hi, n_points, false);
  }

  static Axis periodic(Scalar lo, Scalar hi, std::size_t n_points) {
    if (n_points < 2 || n_points % 2 != 0)
      throw ConfigError("periodic axis needs an even point count >= 2, got " +
                        std::to_string(n_points));
    if (!(hi > lo)) throw ConfigError("axis requires lo < hi");
    return Axis(lo, hi, n_points, true);
  }

  Scalar lo() const { return lo_; }
  Scalar hi() const { return hi_; }
  std::size_t n_points() const { return n_; }
  bool is_periodic() const { return periodic_; }
  Scalar spacing() const { return spacing_; }
  /// Number of intervals between the first and last node (N in x_0..x_N).
  std::size_t intervals() const { return n_ - 1; }
  Scalar length() const { return hi_ - lo_; }

  Scalar operator[](std::size_t i) const { return lo_ + static_cast<Scalar>(i) * spacing_; }

  std::size_t nearest_index(Scalar x) const {
    const Scalar u = std::round((x - lo_) / spacing_);
    if (u <= 0) return 0;
    const auto i = static_cast<std::size_t>(u);
    return i >= n_ ? n_ - 1 : i;
  }

 private:
  Axis(Scalar lo, Scalar hi, std::size_t n, bool periodic)
      : lo_(lo), hi_(hi), n_(n), periodic_(periodic),
        spacing_(periodic ? (hi - lo) / static_cast<Scalar>(n)
                          : (hi - lo) / static_cast<Scalar>(n - 1)) {}

  Scalar lo_ = 0;
  Scalar hi_ = 1;
  std::size_t n_ = 2;
  bool periodic_ = false;
  Scalar spacing_ = 1;
};

/// Tensor phase-space grid: d position axes, d momentum axes, physical constants.
struct PhaseGrid {
  std::vector<Axis<double>> x_axes;
  std::vector<Axis<double>> k_axes;
  double hbar = 1.0;
  double mass = 1.0;

  PhaseGrid() = default;
  PhaseGrid(std::vector<Axis<double>> x, std::vector<Axis<double>> k, double hbar_ = 1.0,
            double mass_ = 1.0);

  std::size_t dim() const { return x_axes.size(); }
  /// Shape of a state array: x axes first, then k axes (last index fastest).
  std::vector<std::size_t> shape() const;
  std::size_t size() const;
  std::size_t x_size() const;
  std::size_t k_size() const;
  /// Product of all spacings (volume element of a Riemann sum).
  double cell_volume() const;
};

/// Index range [first, last], inclusive; empty when last < first.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool contains(std::size_t i) const { return i >= first && i <= last; }
};

/**
 * Patch decomposition of the N+1 nodes x_0..x_N of one axis into p uniform
 * patches of M = N/p intervals. Junction node lM (l = 1..p-1) is shared by
 * patches l and l+1 (patches numbered from 1 here, stored 0-based).
 */
struct PatchLayout {
  std::size_t n_points = 0;
  std::size_t p = 1;
  std::size_t M = 0;
  /// Non-junction nodes owned by each patch; patch 1 also owns x_0 and patch p owns x_N.
  std::vector<IndexRange> owned_ranges;
  std::vector<std::size_t> shared_junctions;

  /// Global index of the first node of patch `patch` (0-based patch number).
  std::size_t patch_begin(std::size_t patch) const { return patch * M; }
  /// Patch whose closed interval [lM, (l+1)M] contains interval `cell`.
  std::size_t patch_of_cell(std::size_t cell) const {
    const std::size_t l = cell / M;
    return l >= p ? p - 1 : l;
  }
};

PatchLayout make_patch_layout(std::size_t n_points, std::size_t p);

}  // namespace chasm
