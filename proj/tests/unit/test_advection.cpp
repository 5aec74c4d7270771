#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chasm/advection.hpp"
#include "chasm/errors.hpp"

using namespace chasm;

namespace {

double bump(double x, double k) { return std::exp(-x * x - 0.5 * (k - 0.3) * (k - 0.3)); }

PhaseGrid grid_1d(std::size_t nx) {
  return PhaseGrid({Axis<double>::node_centered(-8.0, 8.0, nx)},
                   {Axis<double>::node_centered(-3.0, 3.0, 25)});
}

double shift_error(std::size_t nx, const AdvectionOptions& opt, double tau) {
  const auto g = grid_1d(nx);
  Advector adv(g, opt);
  const auto f = sample_field(g, [](auto x, auto k) { return bump(x[0], k[0]); });
  const auto ref = sample_field(g, [&](auto x, auto k) { return bump(x[0] - k[0] * tau, k[0]); });
  return (adv.shifted(f.values, tau) - ref.values).abs().maxCoeff();
}

}  // namespace

TEST_CASE("shift converges at fourth order to the exact characteristic map") {
  AdvectionOptions opt;
  // the sub-cell offset of the feet changes with N, so fit across several halvings
  const double e1 = shift_error(81, opt, 0.37);
  const double e4 = shift_error(641, opt, 0.37);
  CHECK(e1 < 1e-3);
  CHECK(std::log2(e1 / e4) / 3 > 3.7);
}

TEST_CASE("zero shift is the identity and feet outside the domain give zero") {
  const auto g = grid_1d(41);
  Advector adv(g);
  const auto f = sample_field(g, [](auto x, auto k) { return bump(x[0], k[0]) + 0.1; });
  CHECK((adv.shifted(f.values, 0.0) - f.values).abs().maxCoeff() <= 1e-13);

  // |k| >= 0.5 moves every foot by at least 20 > domain length
  const auto far = adv.shifted(f.values, 40.0);
  const auto& k = g.k_axes[0];
  for (std::size_t i = 0; i < 41; ++i)
    for (std::size_t j = 0; j < k.n_points(); ++j) {
      const double v = far[static_cast<Eigen::Index>(i * k.n_points() + j)];
      if (std::abs(k[j]) >= 0.5) CHECK(v == 0.0);
      if (std::abs(k[j]) < 1e-12) CHECK(v == doctest::Approx(f.values[static_cast<Eigen::Index>(i * k.n_points() + j)]));
    }
}

TEST_CASE("patched closures track the serial shift") {
  AdvectionOptions serial;
  AdvectionOptions pmbc{BoundaryCondition::neumann(), {ClosureKind::Pmbc, 4, 30}, 1};
  AdvectionOptions cls{BoundaryCondition::neumann(), {ClosureKind::ClsHbc, 4, 10}, 1};
  const auto g = grid_1d(161);
  const auto f = sample_field(g, [](auto x, auto k) { return bump(x[0] - 1.0, k[0]); });
  Advector a(g, serial), b(g, pmbc), c(g, cls);
  const auto fa = a.shifted(f.values, 0.41);
  CHECK((fa - b.shifted(f.values, 0.41)).abs().maxCoeff() <= 1e-13);
  CHECK((fa - c.shifted(f.values, 0.41)).abs().maxCoeff() <= 1e-8);
  CHECK(b.counters().messages == 6);
}

TEST_CASE("worker count does not change a single bit") {
  const auto g = grid_1d(81);
  const auto f = sample_field(g, [](auto x, auto k) { return bump(x[0], k[0]); });
  AdvectionOptions one{BoundaryCondition::natural(), {ClosureKind::Pmbc, 4, 10}, 1};
  AdvectionOptions four = one;
  four.workers = 4;
  Advector a(g, one), b(g, four);
  const auto fa = a.shifted(f.values, 0.3);
  const auto fb = b.shifted(f.values, 0.3);
  CHECK((fa == fb).all());
}

TEST_CASE("batched fields and in-place output") {
  const auto g = grid_1d(41);
  Advector adv(g);
  const auto f1 = sample_field(g, [](auto x, auto k) { return bump(x[0], k[0]); });
  const auto f2 = sample_field(g, [](auto x, auto k) { return bump(x[0] + 1, k[0]) * k[0]; });
  Eigen::ArrayXd a = f1.values, b = f2.values;
  const Eigen::ArrayXd* in[] = {&a, &b};
  Eigen::ArrayXd* out[] = {&a, &b};
  adv.shift(in, out, 0.2);
  CHECK((a == adv.shifted(f1.values, 0.2)).all());
  CHECK((b == adv.shifted(f2.values, 0.2)).all());
  CHECK(adv.counters().sweeps == 3);
  CHECK(adv.counters().fields == 4);

  Eigen::ArrayXd wrong(7);
  const Eigen::ArrayXd* bad[] = {&wrong};
  Eigen::ArrayXd* bad_out[] = {&wrong};
  CHECK_THROWS_AS(adv.shift(bad, bad_out, 0.1), SizeError);
}

TEST_CASE("3+3 shift moves each axis by its own momentum") {
  const auto x = Axis<double>::node_centered(-6.0, 6.0, 49);
  const auto k = Axis<double>::periodic(-2.0, 2.0, 4);
  const PhaseGrid g({x, x, x}, {k, k, k}, 1.0, 2.0);
  const auto fn = [](std::span<const double> xs, std::span<const double> ks, double t) {
    double r2 = 0;
    for (int a = 0; a < 3; ++a) {
      const double z = xs[a] - 0.5 * ks[a] * t - 0.2 * a;
      r2 += z * z;
    }
    return std::exp(-r2);
  };
  const auto f = sample_field(g, [&](auto xs, auto ks) { return fn(xs, ks, 0.0); });
  const auto ref = sample_field(g, [&](auto xs, auto ks) { return fn(xs, ks, 0.6); });
  Advector adv(g, {BoundaryCondition::natural(), {ClosureKind::Pmbc, 2, 20}, 2});
  const StateField moved = advect(f, 0.6, adv);
  CHECK(moved.time == doctest::Approx(0.6));
  CHECK((moved.values - ref.values).abs().maxCoeff() < 2e-3);
}
