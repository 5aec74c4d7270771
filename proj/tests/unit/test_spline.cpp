#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "chasm/errors.hpp"
#include "chasm/spline.hpp"

using namespace chasm;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

// Spline matrix written out from the defining relations.
Mat dense_matrix(std::size_t n_points, double h, EndRow left, EndRow right) {
  const auto N = static_cast<Eigen::Index>(n_points - 1);
  Mat A = Mat::Zero(N + 3, N + 3);
  const auto end = [&](Eigen::Index row, Eigen::Index col0, EndRow kind) {
    if (kind == EndRow::Clamped) {
      A(row, col0) = -1.0 / (2 * h);
      A(row, col0 + 2) = 1.0 / (2 * h);
    } else {
      A(row, col0) = 1.0 / (6 * h * h);
      A(row, col0 + 1) = -2.0 / (6 * h * h);
      A(row, col0 + 2) = 1.0 / (6 * h * h);
    }
  };
  end(0, 0, left);
  for (Eigen::Index r = 1; r <= N + 1; ++r) {
    A(r, r - 1) = 1.0 / 6;
    A(r, r) = 2.0 / 3;
    A(r, r + 1) = 1.0 / 6;
  }
  end(N + 2, N, right);
  return A;
}

Vec dense_rhs(const std::vector<double>& phi, double left, double right) {
  Vec b(static_cast<Eigen::Index>(phi.size() + 2));
  b[0] = left;
  for (std::size_t i = 0; i < phi.size(); ++i) b[static_cast<Eigen::Index>(i + 1)] = phi[i];
  b[b.size() - 1] = right;
  return b;
}

double brute_eval(const Vec& eta, const Axis<double>& axis, double x) {
  double s = 0;
  for (Eigen::Index k = 0; k < eta.size(); ++k) s += eta[k] * bspline_value(static_cast<long>(k) - 1, x, axis);
  return s;
}

}  // namespace

TEST_CASE("B-spline nodal values and partition of unity") {
  const auto axis = Axis<double>::node_centered(0.0, 1.0, 11);
  CHECK(bspline_value(5, axis[5], axis) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(bspline_value(5, axis[4], axis) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(bspline_value(5, axis[6], axis) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(std::abs(bspline_value(5, axis[7], axis)) <= 1e-15);
  CHECK(std::abs(bspline_value(5, axis[3], axis)) <= 1e-15);

  double worst = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    double s = 0;
    for (long nu = -1; nu <= 11; ++nu) s += bspline_value(nu, x, axis);
    worst = std::max(worst, std::abs(s - 1));
  }
  CHECK(worst <= 1e-13);

  for (int i = 0; i <= 50; ++i) {
    const double t = i / 50.0;
    const auto w = cubic_weights(t);
    const double x = axis[3] + t * axis.spacing();
    for (int j = 0; j < 4; ++j) CHECK(w[j] == doctest::Approx(bspline_value(2 + j, x, axis)).epsilon(1e-13));
  }
}

TEST_CASE("LU factors reconstruct the dense matrix") {
  for (EndRow left : {EndRow::Clamped, EndRow::Natural})
    for (EndRow right : {EndRow::Clamped, EndRow::Natural})
      for (std::size_t n : {4u, 5u, 17u, 161u}) {
        const double h = 8.0 / static_cast<double>(n - 1);
        const LUFactors<double> lu(n, h, left, right);
        const Mat A = dense_matrix(n, h, left, right);
        const double rel = (lu.lower() * lu.upper() - A).norm() / A.norm();
        CHECK(rel <= 1e-13);
        CHECK(lu.size() == n + 2);
      }
}

TEST_CASE("solves match a dense solve and the three-term relation") {
  const std::size_t n = 41;
  const auto axis = Axis<double>::node_centered(-2.0, 3.0, n);
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = std::exp(std::sin(axis[i])) + 0.3 * axis[i];

  for (const auto& bc : {BoundaryCondition::clamped(0.7, -1.2), BoundaryCondition::neumann(),
                         BoundaryCondition::natural()}) {
    const auto c = solve_coeffs<double>(phi, bc, axis);
    const Mat A = dense_matrix(n, axis.spacing(), bc.end_row(), bc.end_row());
    const Vec ref = A.fullPivLu().solve(dense_rhs(phi, bc.phi_L, bc.phi_R));
    CHECK((c.eta - ref).cwiseAbs().maxCoeff() <= 1e-12);

    double res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<long>(i);
      res = std::max(res, std::abs((c(k - 1) + 4 * c(k) + c(k + 1)) / 6 - phi[i]));
    }
    CHECK(res <= 1e-12);
  }
}

TEST_CASE("clamped spline reproduces cubics") {
  const auto axis = Axis<double>::node_centered(-1.0, 2.0, 13);
  const auto p = [](double x) { return 1.5 - 0.5 * x + 2 * x * x - 0.75 * x * x * x; };
  const auto dp = [](double x) { return -0.5 + 4 * x - 2.25 * x * x; };
  std::vector<double> phi(axis.n_points());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = p(axis[i]);
  const auto c = solve_coeffs<double>(phi, BoundaryCondition::clamped(dp(-1.0), dp(2.0)), axis);
  double worst = 0;
  for (int i = 0; i <= 600; ++i) {
    const double x = -1.0 + 3.0 * i / 600.0;
    worst = std::max(worst, std::abs(eval_spline(c, x) - p(x)));
  }
  CHECK(worst <= 1e-12);
  CHECK(c.node_derivative(0) == doctest::Approx(dp(-1.0)).epsilon(1e-12));
  CHECK(eval_spline(c, 2.5) == 0.0);
  CHECK(eval_spline(c, -1.01) == 0.0);
}

TEST_CASE("evaluation agrees with the explicit basis sum") {
  const auto axis = Axis<double>::node_centered(0.0, 4.0, 21);
  std::vector<double> phi(axis.n_points());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::cos(1.3 * axis[i]);
  const auto c = solve_coeffs<double>(phi, BoundaryCondition::natural(), axis);
  for (int i = 0; i <= 97; ++i) {
    const double x = 4.0 * i / 97.0;
    CHECK(eval_spline(c, x) == doctest::Approx(brute_eval(c.eta, axis, x)).epsilon(1e-13));
  }
}

TEST_CASE("inverse rows and transposed solves") {
  const std::size_t n = 25;
  const double h = 0.2;
  const LUFactors<double> lu(n, h, EndRow::Natural, EndRow::Clamped);
  const Mat Ainv = dense_matrix(n, h, EndRow::Natural, EndRow::Clamped).inverse();
  for (std::size_t r : {0u, 1u, 12u, 25u, 26u}) {
    const Vec row = lu.inverse_row(r);
    CHECK((row.transpose() - Ainv.row(static_cast<Eigen::Index>(r))).cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("batched column solve matches single solves") {
  const std::size_t n = 30;
  const LUFactors<double> lu(n, 0.1, EndRow::Clamped, EndRow::Clamped);
  RowMajorArray<double> rhs = RowMajorArray<double>::Random(static_cast<Eigen::Index>(n + 2), 5);
  RowMajorArray<double> batch = rhs;
  lu.solve_columns(batch);
  for (Eigen::Index c = 0; c < 5; ++c) {
    Vec col = rhs.col(c).matrix();
    lu.solve_in_place(col);
    CHECK((col - batch.col(c).matrix()).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("tensor spline matches a Kronecker dense solve") {
  const auto ax = Axis<double>::node_centered(-1.0, 1.0, 7);
  const auto ay = Axis<double>::node_centered(0.0, 2.0, 9);
  std::vector<double> values(7 * 9);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 9; ++j) values[i * 9 + j] = std::sin(ax[i] + 0.5 * ay[j] * ay[j]);

  const std::vector<BoundaryCondition> bcs{BoundaryCondition::neumann(), BoundaryCondition::natural()};
  const TensorSpline<double> ts({ax, ay}, values, bcs);

  const Mat Ax = dense_matrix(7, ax.spacing(), EndRow::Clamped, EndRow::Clamped);
  const Mat Ay = dense_matrix(9, ay.spacing(), EndRow::Natural, EndRow::Natural);
  const Mat K = Eigen::kroneckerProduct(Ax, Ay);
  Vec rhs = Vec::Zero(9 * 11);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      rhs[static_cast<Eigen::Index>((i + 1) * 11 + j + 1)] = values[i * 9 + j];
  const Vec C = K.fullPivLu().solve(rhs);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 2.0);
  for (int s = 0; s < 200; ++s) {
    const double p[2] = {ux(rng), uy(rng)};
    double ref = 0;
    for (long a = -1; a <= 7; ++a)
      for (long b = -1; b <= 9; ++b)
        ref += C[(a + 1) * 11 + (b + 1)] * bspline_value(a, p[0], ax) * bspline_value(b, p[1], ay);
    CHECK(ts(p) == doctest::Approx(ref).epsilon(1e-11));
    CHECK(eval_spline_tensor(ts, std::span<const double>(p, 2)) == ts(p));
  }
  const double out[2] = {1.5, 1.0};
  CHECK(ts(out) == 0.0);
}

TEST_CASE("size and closure errors") {
  CHECK_THROWS_AS(LUFactors<double>(3, 0.1, EndRow::Clamped, EndRow::Clamped), SizeError);
  const auto axis = Axis<double>::node_centered(0.0, 1.0, 5);
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(solve_coeffs<double>(three, BoundaryCondition::neumann(), axis), SizeError);
  std::vector<double> values(5, 1.0);
  CHECK_THROWS_AS(TensorSpline<double>({axis}, values, {BoundaryCondition::clamped(1.0, 0.0)}),
                  UnsupportedError);
}
