#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "chasm/grid.hpp"

namespace chasm {

/**
 * Distribution function sampled on a PhaseGrid.
 *
 * Values are stored row-major over the grid shape (x axes first, k axes
 * last, last index fastest).
 */
struct StateField {
  std::vector<std::size_t> shape;
  Eigen::ArrayXd values;
  double time = 0.0;
  /// Patches per decomposed x axis (1 = serial layout).
  std::size_t patches = 1;

  StateField() = default;
  explicit StateField(const PhaseGrid& grid, double t = 0.0);

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  bool all_finite() const { return values.allFinite(); }
  /// Throws SizeError when `other` has a different shape.
  void require_same_shape(const StateField& other) const;
};

using PhaseFunction = std::function<double(std::span<const double> x, std::span<const double> k)>;

/// Samples `fn` at every grid point.
StateField sample_field(const PhaseGrid& grid, const PhaseFunction& fn, double time = 0.0);

/// Calls `visit(flat_index, x, k)` for every grid point in storage order.
void for_each_point(const PhaseGrid& grid,
                    const std::function<void(std::size_t, std::span<const double>,
                                             std::span<const double>)>& visit);

}  // namespace chasm
