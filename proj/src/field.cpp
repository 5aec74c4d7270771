#include "chasm/field.hpp"

#include <string>

namespace chasm {

StateField::StateField(const PhaseGrid& grid, double t)
    : shape(grid.shape()), values(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(grid.size()))),
      time(t) {}

void StateField::require_same_shape(const StateField& other) const {
  if (shape != other.shape || values.size() != other.values.size())
    throw SizeError("field shape mismatch (" + std::to_string(values.size()) + " vs " +
                    std::to_string(other.values.size()) + " points)");
}

void for_each_point(const PhaseGrid& grid,
                    const std::function<void(std::size_t, std::span<const double>,
                                             std::span<const double>)>& visit) {
  const std::size_t d = grid.dim();
  const auto shape = grid.shape();
  std::vector<std::size_t> idx(2 * d, 0);
  std::vector<double> x(d), k(d);
  const std::size_t total = grid.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t a = 0; a < d; ++a) {
      x[a] = grid.x_axes[a][idx[a]];
      k[a] = grid.k_axes[a][idx[d + a]];
    }
    visit(flat, x, k);
    for (std::size_t a = 2 * d; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
}

StateField sample_field(const PhaseGrid& grid, const PhaseFunction& fn, double time) {
  StateField f(grid, time);
  for_each_point(grid, [&](std::size_t i, std::span<const double> x, std::span<const double> k) {
    f.values[static_cast<Eigen::Index>(i)] = fn(x, k);
  });
  return f;
}

}  // namespace chasm
