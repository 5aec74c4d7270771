#include "chasm/grid.hpp"

#include <numeric>

namespace chasm {

PhaseGrid::PhaseGrid(std::vector<Axis<double>> x, std::vector<Axis<double>> k, double hbar_,
                     double mass_)
    : x_axes(std::move(x)), k_axes(std::move(k)), hbar(hbar_), mass(mass_) {
  if (x_axes.empty()) throw ConfigError("phase grid needs at least one position axis");
  if (x_axes.size() != k_axes.size())
    throw ConfigError("phase grid needs as many momentum axes as position axes (" +
                      std::to_string(x_axes.size()) + " vs " + std::to_string(k_axes.size()) +
                      ")");
  if (!(hbar > 0) || !(mass > 0)) throw ConfigError("hbar and mass must be positive");
}

std::vector<std::size_t> PhaseGrid::shape() const {
  std::vector<std::size_t> s;
  s.reserve(2 * dim());
  for (const auto& a : x_axes) s.push_back(a.n_points());
  for (const auto& a : k_axes) s.push_back(a.n_points());
  return s;
}

std::size_t PhaseGrid::size() const { return x_size() * k_size(); }

std::size_t PhaseGrid::x_size() const {
  std::size_t n = 1;
  for (const auto& a : x_axes) n *= a.n_points();
  return n;
}

std::size_t PhaseGrid::k_size() const {
  std::size_t n = 1;
  for (const auto& a : k_axes) n *= a.n_points();
  return n;
}

double PhaseGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : x_axes) v *= a.spacing();
  for (const auto& a : k_axes) v *= a.spacing();
  return v;
}

PatchLayout make_patch_layout(std::size_t n_points, std::size_t p) {
  if (p < 1) throw ConfigError("patch count must be >= 1");
  if (n_points < 2) throw ConfigError("patch layout needs at least 2 points");
  const std::size_t intervals = n_points - 1;
  if (intervals % p != 0)
    throw ConfigError("cannot split " + std::to_string(n_points) + " points (" +
                      std::to_string(intervals) + " intervals) into " + std::to_string(p) +
                      " uniform patches: n_points-1 = " + std::to_string(intervals) +
                      " is not divisible by p = " + std::to_string(p));

  PatchLayout layout;
  layout.n_points = n_points;
  layout.p = p;
  layout.M = intervals / p;
  for (std::size_t l = 1; l < p; ++l) layout.shared_junctions.push_back(l * layout.M);
  for (std::size_t l = 0; l < p; ++l) {
    const std::size_t first = l == 0 ? 0 : l * layout.M + 1;
    const std::size_t last = l + 1 == p ? intervals : (l + 1) * layout.M - 1;
    layout.owned_ranges.push_back({first, last});
  }
  return layout;
}

}  // namespace chasm
