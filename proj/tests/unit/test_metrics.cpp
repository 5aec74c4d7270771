#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chasm/errors.hpp"
#include "chasm/harness.hpp"
#include "chasm/metrics.hpp"

using namespace chasm;
using std::numbers::pi;

namespace {

PhaseGrid plane() {
  return PhaseGrid({Axis<double>::node_centered(-10.0, 10.0, 201)}, {Axis<double>::node_centered(-5.0, 5.0, 101)});
}

double gauss(double x, double k) { return std::exp(-x * x / 2 - 2 * k * k) / pi; }

}  // namespace

TEST_CASE("trapezoid weights") {
  const auto w = trapezoid_weights(Axis<double>::node_centered(0.0, 1.0, 4));
  CHECK(w == std::vector<double>{0.5, 1, 1, 0.5});
  const auto p = trapezoid_weights(Axis<double>::periodic(0.0, 1.0, 4));
  CHECK(p == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("mass and error norms") {
  const auto g = plane();
  const auto f = sample_field(g, [](auto x, auto k) { return gauss(x[0], k[0]); });
  CHECK(total_mass(f.values, g) == doctest::Approx(1.0).epsilon(1e-12));

  // a constant offset c gives eps_2 = |c| sqrt(area)
  const Eigen::ArrayXd shifted = f.values + 1e-3;
  CHECK(eps_inf(shifted, f.values) == doctest::Approx(1e-3));
  CHECK(eps_2(shifted, f.values, g) == doctest::Approx(1e-3 * std::sqrt(20.0 * 10.0)).epsilon(1e-10));
  CHECK(eps_mass(shifted, f.values, g) == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(eps_inf(f, f.values) == 0.0);
  CHECK_THROWS_AS(eps_inf(Eigen::ArrayXd::Zero(3), f.values), SizeError);
  CHECK_THROWS_AS(total_mass(Eigen::ArrayXd::Zero(3), g), SizeError);
}

TEST_CASE("marginal and reduced Wigner function") {
  const auto g = plane();
  // separable: P(x) = g(x) * trapezoid sum of w
  const auto f = sample_field(g, [](auto x, auto k) { return std::exp(-x[0] * x[0]) * (1 + k[0] * k[0]); });
  const auto P = marginal_density(f.values, g);
  const double wsum = 10.0 + 250.0 / 3.0 + 0.1 * 0.1 * 10.0 / 6.0;  // trapezoid of 1 + k^2 on [-5, 5]
  CHECK(P[100] == doctest::Approx(wsum).epsilon(1e-12));
  CHECK(P[120] == doctest::Approx(std::exp(-4.0) * wsum).epsilon(1e-12));
  CHECK(min_marginal(f.values, g) >= 0.0);

  const auto W = reduced_wigner(f.values, g);
  CHECK(W.rows() == 201);
  CHECK(W.cols() == 101);
  CHECK(W(100, 50) == f.values[100 * 101 + 50]);

  const auto x = Axis<double>::node_centered(-1.0, 1.0, 3);
  const auto k = Axis<double>::periodic(-1.0, 1.0, 4);
  const PhaseGrid g3({x, x, x}, {k, k, k});
  const auto ones = Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(g3.size()));
  const auto W3 = reduced_wigner(ones, g3, 1);
  // other axes: x trapezoid 0.5 + 1 + 0.5 = 2 (times dx 1) and k sum 4 * 0.5 = 2
  CHECK(W3(0, 0) == doctest::Approx(16.0));
  CHECK_THROWS_AS(reduced_wigner(ones, g3, 3), SizeError);
}

TEST_CASE("compensated sums do not depend on the order of terms") {
  std::vector<double> v;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) v.push_back(u(rng) * std::pow(10.0, i % 13 - 6));
  CompensatedSum a, b;
  for (double x : v) a.add(x);
  std::shuffle(v.begin(), v.end(), rng);
  for (double x : v) b.add(x);
  CHECK(std::abs(a.value() - b.value()) <= 1e-13 * std::abs(a.value()));
}

TEST_CASE("fitted order and convergence table") {
  const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 4));
  CHECK(std::abs(fitted_order(h, e) - 4.0) <= 1e-6);

  const auto rows = convergence_table(h, e, e);
  CHECK(rows.size() == 4);
  CHECK_FALSE(rows[0].order.has_value());
  CHECK(std::abs(*rows[1].order - 4.0) <= 1e-6);
  CHECK(convergence_table({0.1}, {1e-3}, {1e-3}).front().order == std::nullopt);
  CHECK_THROWS_AS(fitted_order({1.0}, {1.0}), SizeError);
  CHECK_THROWS_AS(fitted_order({1.0, 1.0}, {1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(fitted_order({1.0, 2.0}, {0.0, 2.0}), ConfigError);
}
