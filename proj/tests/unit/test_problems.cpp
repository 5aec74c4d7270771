#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chasm/errors.hpp"
#include "chasm/metrics.hpp"
#include "chasm/problems.hpp"

using namespace chasm;
using std::numbers::pi;

TEST_CASE("free Gaussian moves along straight characteristics") {
  CHECK(free_gaussian_exact(0.0, 0.5, 0.0, 1.0, 0.5, 1.0, 1.0) == doctest::Approx(1 / pi));
  CHECK(free_gaussian_exact(1.5, 0.5, 3.0, 1.0, 0.5, 1.0, 1.0) == doctest::Approx(1 / pi));
  CHECK(free_gaussian_exact(1.0, 0.5, 2.0, 1.0, 0.5, 2.0, 2.0) == doctest::Approx(1 / pi));

  const auto g = PhaseGrid({Axis<double>::node_centered(-12.0, 12.0, 241)}, {Axis<double>::node_centered(-6.0, 6.0, 121)});
  const auto f = sample_field(g, [](auto x, auto k) { return free_gaussian_exact(x[0], k[0], 1.0, 1.0, 0.5, 1.0, 1.0); });
  CHECK(total_mass(f.values, g) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("harmonic characteristics are a rotation with the right period") {
  const double omega = (pi / 5) * (pi / 5);
  const auto f0 = [](double x, double k) { return harmonic_initial(x, k); };
  for (double x : {-2.0, 0.3, 1.0})
    for (double k : {-0.7, 0.0, 0.4}) {
      CHECK(harmonic_exact(x, k, 10.0, omega, 1.0, 1.0, f0) == doctest::Approx(f0(x, k)).epsilon(1e-12));
      CHECK(harmonic_exact(x, k, 0.0, omega, 1.0, 1.0, f0) == f0(x, k));
    }
  // half period maps (x, k) to (-x, -k)
  const auto p = harmonic_characteristic(0.8, -0.3, 5.0, omega, 1.0, 1.0);
  CHECK(p.x == doctest::Approx(-0.8));
  CHECK(p.k == doctest::Approx(0.3));

  // the flow conserves the quadratic form m w x^2 + hbar^2 k^2 / (m w) for m = 2, hbar = 1
  const double w = std::sqrt(omega), m = 2.0;
  const auto q = harmonic_characteristic(1.0, 0.5, 1.7, omega, 1.0, m);
  CHECK(m * w * q.x * q.x + q.k * q.k / (m * w) == doctest::Approx(m * w + 0.25 / (m * w)));

  // d/dt f(x, k, t) along the characteristic: direct finite-difference check of the Liouville equation
  const double x = 0.6, k = -0.2, t = 0.9, e = 1e-5;
  const auto F = [&](double xx, double kk, double tt) { return harmonic_exact(xx, kk, tt, omega, 1.0, 1.0, f0); };
  const double ft = (F(x, k, t + e) - F(x, k, t - e)) / (2 * e);
  const double fx = (F(x + e, k, t) - F(x - e, k, t)) / (2 * e);
  const double fk = (F(x, k + e, t) - F(x, k - e, t)) / (2 * e);
  CHECK(ft + k * fx - omega * x * fk == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("six-dimensional Gaussian") {
  const double x[3] = {1, 0, 0}, k[3] = {0, 0, 0};
  CHECK(initial_gaussian_6d(x, k) == doctest::Approx(1 / (pi * pi * pi)));
}

TEST_CASE("1s orbital and Wigner function") {
  const double origin[3] = {0, 0, 0};
  CHECK(hydrogen_1s_orbital(origin) == doctest::Approx(1 / (2 * std::sqrt(2.0) * pi * pi)));

  const auto x = Axis<double>::node_centered(-2.0, 2.0, 5);
  const auto k = Axis<double>::periodic(-3.2, 3.2, 16);
  const PhaseGrid g({x, x, x}, {k, k, k});
  const auto W = hydrogen_1s_wigner(g, 64);
  CHECK(W.values.allFinite());

  // W(0, 0) = int phi(-y/2) phi(y/2) dy / (2 pi)^3 = 1/(8 pi^4) int e^{-|y|} dy = 1 / pi^3
  const std::size_t centre = (2 * 25 + 2 * 5 + 2) * g.k_size() + (8 * 256 + 8 * 16 + 8);
  CHECK(W.values[static_cast<Eigen::Index>(centre)] == doctest::Approx(1 / (pi * pi * pi)).epsilon(2e-2));

  // parity: W(x, k) = W(-x, -k) on the symmetric part of the grids
  const auto at = [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t j0, std::size_t j1, std::size_t j2) {
    return W.values[static_cast<Eigen::Index>(((i0 * 5 + i1) * 5 + i2) * g.k_size() + (j0 * 16 + j1) * 16 + j2)];
  };
  CHECK(at(1, 2, 4, 5, 9, 3) == doctest::Approx(at(3, 2, 0, 11, 7, 13)).epsilon(1e-10));
  // spherical symmetry: permuting axes leaves W unchanged
  CHECK(at(1, 2, 4, 5, 9, 3) == doctest::Approx(at(4, 1, 2, 3, 5, 9)).epsilon(1e-10));
}

TEST_CASE("problem specs and errors") {
  for (auto kind : {ProblemKind::SineSpline, ProblemKind::FreeAdvection2D, ProblemKind::Harmonic2D, ProblemKind::Hydrogen1s}) {
    CHECK(parse_problem(to_string(kind)) == kind);
    CHECK_NOTHROW(ProblemSpec::defaults(kind).validate());
  }
  CHECK_THROWS_AS(parse_problem("helium"), ConfigError);
  auto s = ProblemSpec::defaults(ProblemKind::Harmonic2D);
  CHECK(s.get("omega") == doctest::Approx(pi * pi / 25));
  s.params["omega"] = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(s.get("charge"), ConfigError);

  const auto x = Axis<double>::node_centered(-1.0, 1.0, 3);
  const auto k = Axis<double>::periodic(-1.0, 1.0, 4);
  CHECK_THROWS_AS(hydrogen_1s_wigner(PhaseGrid({x}, {k}), 8), ConfigError);
  CHECK_THROWS_AS(hydrogen_1s_wigner(PhaseGrid({x, x, x}, {k, k, k}), 12), ConfigError);

  const auto samples = sine_samples(Axis<double>::node_centered(0.0, 8.0, 5));
  CHECK(samples[2] == doctest::Approx(std::sin(4.0)));
}
