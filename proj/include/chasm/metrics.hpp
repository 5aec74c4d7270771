#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chasm/field.hpp"
#include "chasm/grid.hpp"

namespace chasm {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> eps2;
  std::vector<double> eps_inf;
  std::vector<double> eps_mass;
  std::vector<double> min_marginal;

  std::size_t size() const { return times.size(); }
  void append(double t, double e2, double einf, double emass, double min_p);
};

/// Trapezoid weights of one axis (half weights at node-centered ends, uniform if periodic).
std::vector<double> trapezoid_weights(const Axis<double>& axis);

/// max |num - ref| over the grid.
double eps_inf(const Eigen::ArrayXd& num, const Eigen::ArrayXd& ref);
double eps_inf(const StateField& num, const Eigen::ArrayXd& ref);

/// sqrt of the trapezoid integral of (num - ref)^2 over X x K.
double eps_2(const Eigen::ArrayXd& num, const Eigen::ArrayXd& ref, const PhaseGrid& grid);

/// Trapezoid integral of f over X x K, summed in storage order with compensation.
double total_mass(const Eigen::ArrayXd& f, const PhaseGrid& grid);

/// |mass(num) - mass(f0)|.
double eps_mass(const Eigen::ArrayXd& num, const Eigen::ArrayXd& f0, const PhaseGrid& grid);

/// P(x) = integral of f over all k axes, one value per x point.
Eigen::ArrayXd marginal_density(const Eigen::ArrayXd& f, const PhaseGrid& grid);
double min_marginal(const Eigen::ArrayXd& f, const PhaseGrid& grid);

/// Projection onto the (x_axis, k_axis) plane: (n_x x n_k), row-major.
Eigen::ArrayXXd reduced_wigner(const Eigen::ArrayXd& f, const PhaseGrid& grid,
                               std::size_t axis = 0);

}  // namespace chasm
