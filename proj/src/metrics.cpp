#include "chasm/metrics.hpp"

#include <cmath>
#include <string>

#include "chasm/errors.hpp"

namespace chasm {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

void ErrorSeries::append(double t, double e2, double einf, double emass, double min_p) {
  times.push_back(t);
  eps2.push_back(e2);
  eps_inf.push_back(einf);
  eps_mass.push_back(emass);
  min_marginal.push_back(min_p);
}

std::vector<double> trapezoid_weights(const Axis<double>& axis) {
  std::vector<double> w(axis.n_points(), 1.0);
  if (!axis.is_periodic()) {
    w.front() = 0.5;
    w.back() = 0.5;
  }
  return w;
}

namespace {

void require_size(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  if (a.size() != b.size())
    throw SizeError("metric inputs differ in size (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
}

void require_grid(const Eigen::ArrayXd& a, const PhaseGrid& grid) {
  if (static_cast<std::size_t>(a.size()) != grid.size())
    throw SizeError("field of " + std::to_string(a.size()) + " points on a grid of " +
                    std::to_string(grid.size()));
}

/// Per-axis weights in storage order (x axes, then k axes).
std::vector<std::vector<double>> all_weights(const PhaseGrid& grid) {
  std::vector<std::vector<double>> w;
  for (const auto& a : grid.x_axes) w.push_back(trapezoid_weights(a));
  for (const auto& a : grid.k_axes) w.push_back(trapezoid_weights(a));
  return w;
}

/// Weighted compensated sum of g(i) over the grid in storage order.
template <typename G>
double weighted_sum(const PhaseGrid& grid, G g) {
  const auto w = all_weights(grid);
  const auto shape = grid.shape();
  const std::size_t dims = shape.size();
  std::vector<std::size_t> idx(dims, 0);
  CompensatedSum sum;
  const std::size_t total = grid.size();
  // the last axis varies fastest; hoist the weight of the others
  const std::size_t inner = shape.back();
  for (std::size_t base = 0; base < total; base += inner) {
    double wo = 1.0;
    for (std::size_t a = 0; a + 1 < dims; ++a) wo *= w[a][idx[a]];
    for (std::size_t j = 0; j < inner; ++j) sum.add(wo * w.back()[j] * g(base + j));
    for (std::size_t a = dims - 1; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return sum.value() * grid.cell_volume();
}

}  // namespace

double eps_inf(const Eigen::ArrayXd& num, const Eigen::ArrayXd& ref) {
  require_size(num, ref);
  if (num.size() == 0) return 0.0;
  return (num - ref).abs().maxCoeff();
}

double eps_inf(const StateField& num, const Eigen::ArrayXd& ref) { return eps_inf(num.values, ref); }

double eps_2(const Eigen::ArrayXd& num, const Eigen::ArrayXd& ref, const PhaseGrid& grid) {
  require_size(num, ref);
  require_grid(num, grid);
  const double s = weighted_sum(grid, [&](std::size_t i) {
    const double d = num[static_cast<Eigen::Index>(i)] - ref[static_cast<Eigen::Index>(i)];
    return d * d;
  });
  return std::sqrt(s);
}

double total_mass(const Eigen::ArrayXd& f, const PhaseGrid& grid) {
  require_grid(f, grid);
  return weighted_sum(grid, [&](std::size_t i) { return f[static_cast<Eigen::Index>(i)]; });
}

double eps_mass(const Eigen::ArrayXd& num, const Eigen::ArrayXd& f0, const PhaseGrid& grid) {
  require_size(num, f0);
  return std::abs(total_mass(num, grid) - total_mass(f0, grid));
}

Eigen::ArrayXd marginal_density(const Eigen::ArrayXd& f, const PhaseGrid& grid) {
  require_grid(f, grid);
  const std::size_t X = grid.x_size(), K = grid.k_size();
  std::vector<double> wk(K, 1.0);
  {
    std::vector<std::size_t> idx(grid.dim(), 0);
    for (std::size_t c = 0; c < K; ++c) {
      std::size_t rem = c;
      for (std::size_t a = grid.dim(); a-- > 0;) {
        const std::size_t n = grid.k_axes[a].n_points();
        idx[a] = rem % n;
        rem /= n;
      }
      for (std::size_t a = 0; a < grid.dim(); ++a)
        wk[c] *= trapezoid_weights(grid.k_axes[a])[idx[a]];
    }
  }
  double dk = 1.0;
  for (const auto& a : grid.k_axes) dk *= a.spacing();
  Eigen::ArrayXd P(static_cast<Eigen::Index>(X));
  for (std::size_t r = 0; r < X; ++r) {
    CompensatedSum s;
    for (std::size_t c = 0; c < K; ++c) s.add(wk[c] * f[static_cast<Eigen::Index>(r * K + c)]);
    P[static_cast<Eigen::Index>(r)] = s.value() * dk;
  }
  return P;
}

double min_marginal(const Eigen::ArrayXd& f, const PhaseGrid& grid) {
  return marginal_density(f, grid).minCoeff();
}

Eigen::ArrayXXd reduced_wigner(const Eigen::ArrayXd& f, const PhaseGrid& grid, std::size_t axis) {
  require_grid(f, grid);
  const std::size_t d = grid.dim();
  if (axis >= d) throw SizeError("reduced Wigner axis " + std::to_string(axis) + " out of range");
  const auto shape = grid.shape();
  const auto w = all_weights(grid);
  const std::size_t nx = shape[axis], nk = shape[d + axis];
  double vol = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    if (a == axis) continue;
    vol *= grid.x_axes[a].spacing() * grid.k_axes[a].spacing();
  }
  std::vector<CompensatedSum> acc(nx * nk);
  std::vector<std::size_t> idx(2 * d, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double wi = 1.0;
    for (std::size_t a = 0; a < 2 * d; ++a)
      if (a != axis && a != d + axis) wi *= w[a][idx[a]];
    acc[idx[axis] * nk + idx[d + axis]].add(wi * f[static_cast<Eigen::Index>(i)]);
    for (std::size_t a = 2 * d; a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  Eigen::ArrayXXd out(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nk));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nk; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc[i * nk + j].value() * vol;
  return out;
}

}  // namespace chasm
