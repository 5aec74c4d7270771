#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "chasm/errors.hpp"
#include "chasm/grid.hpp"

namespace chasm {

template <typename Scalar>
using RowMajorArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Closure imposed by the first or last row of the coefficient system.
enum class EndRow {
  Clamped,  // (eta_{i+1} - eta_{i-1}) / 2h = prescribed slope
  Natural,  // (eta_{i-1} - 2 eta_i + eta_{i+1}) / h^2 = 0
};

struct BoundaryCondition {
  enum class Kind { Clamped, Neumann, Natural };
  Kind kind = Kind::Neumann;
  double phi_L = 0.0;
  double phi_R = 0.0;

  static BoundaryCondition clamped(double left, double right) {
    return {Kind::Clamped, left, right};
  }
  static BoundaryCondition neumann() { return {Kind::Neumann, 0.0, 0.0}; }
  static BoundaryCondition natural() { return {Kind::Natural, 0.0, 0.0}; }

  EndRow end_row() const { return kind == Kind::Natural ? EndRow::Natural : EndRow::Clamped; }
};

/// Weights of B_{v-1}, B_v, B_{v+1}, B_{v+2} at x = x_v + t h, t in [0, 1].
template <typename Scalar>
inline std::array<Scalar, 4> cubic_weights(Scalar t) {
  const Scalar s = Scalar(1) - t;
  const Scalar t2 = t * t;
  const Scalar t3 = t2 * t;
  return {s * s * s / Scalar(6), (Scalar(3) * t3 - Scalar(6) * t2 + Scalar(4)) / Scalar(6),
          (-Scalar(3) * t3 + Scalar(3) * t2 + Scalar(3) * t + Scalar(1)) / Scalar(6),
          t3 / Scalar(6)};
}

/// Cubic B-spline B_nu centred on node x_nu of `axis` (nu may be -1 or N+1).
template <typename Scalar>
Scalar bspline_value(long nu, Scalar x, const Axis<Scalar>& axis) {
  const Scalar h = axis.spacing();
  const Scalar xn = axis.lo() + static_cast<Scalar>(nu) * h;
  const Scalar r = std::abs(x - xn) / h;
  if (r >= Scalar(2)) return Scalar(0);
  if (r >= Scalar(1)) {
    const Scalar u = Scalar(2) - r;
    return u * u * u / Scalar(6);
  }
  return (Scalar(4) - Scalar(6) * r * r + Scalar(3) * r * r * r) / Scalar(6);
}

/**
 * LU factors of the (N+3)x(N+3) spline coefficient matrix A for N+1 nodes.
 *
 * Rows 1..N+1 carry the three-term relation (1/6, 2/3, 1/6); row 0 and row
 * N+2 carry the chosen end closures. A = L U with L unit lower bidiagonal
 * plus two extra entries in its last row, U upper bidiagonal plus one extra
 * entry in its first row. Factorization, solve, and transposed solve are O(N).
 */
template <typename Scalar = double>
class LUFactors {
 public:
  LUFactors() = default;

  LUFactors(std::size_t n_points, Scalar h, EndRow left, EndRow right)
      : n_(n_points), h_(h), left_(left), right_(right) {
    if (n_points < 4)
      throw SizeError("spline solve needs N >= 3 (at least 4 nodes), got " +
                      std::to_string(n_points) + " nodes");
    const std::size_t N = n_points - 1;
    const std::size_t size = N + 3;
    const Scalar sixth = Scalar(1) / Scalar(6);
    const Scalar two_thirds = Scalar(2) / Scalar(3);

    first_ = end_row_entries(left);
    const auto last = end_row_entries(right);

    diag_.resize(size);
    sub_.resize(N + 1);
    super_.resize(N + 1);

    diag_[0] = first_[0];
    sub_[0] = sixth / first_[0];
    diag_[1] = two_thirds - sub_[0] * first_[1];
    super_[0] = sixth - sub_[0] * first_[2];
    for (std::size_t r = 2; r <= N + 1; ++r) {
      sub_[r - 1] = sixth / diag_[r - 1];
      diag_[r] = two_thirds - sub_[r - 1] * super_[r - 2];
      super_[r - 1] = sixth;
    }
    last_lower_[0] = last[0] / diag_[N];
    const Scalar rest = last[1] - last_lower_[0] * super_[N - 1];
    last_lower_[1] = rest / diag_[N + 1];
    diag_[N + 2] = last[2] - last_lower_[1] * super_[N];
  }

  std::size_t n_points() const { return n_; }
  std::size_t size() const { return n_ + 2; }
  Scalar h() const { return h_; }
  EndRow left() const { return left_; }
  EndRow right() const { return right_; }

  /// In-place solve of A x = b.
  template <typename Vec>
  void solve_in_place(Vec& b) const {
    const std::size_t N = n_ - 1;
    for (std::size_t r = 1; r <= N + 1; ++r) b[r] -= sub_[r - 1] * b[r - 1];
    b[N + 2] -= last_lower_[0] * b[N] + last_lower_[1] * b[N + 1];

    b[N + 2] /= diag_[N + 2];
    for (std::size_t r = N + 1; r >= 1; --r) b[r] = (b[r] - super_[r - 1] * b[r + 1]) / diag_[r];
    b[0] = (b[0] - first_[1] * b[1] - first_[2] * b[2]) / first_[0];
  }

  /// Batched solve: every column of `rhs` ((N+3) x C, row-major) is a right-hand side.
  template <typename Derived>
  void solve_columns(const Eigen::ArrayBase<Derived>& rhs_const) const {
    auto& rhs = const_cast<Eigen::ArrayBase<Derived>&>(rhs_const);
    const Eigen::Index N = static_cast<Eigen::Index>(n_ - 1);
    for (Eigen::Index r = 1; r <= N + 1; ++r) rhs.row(r) -= sub_[r - 1] * rhs.row(r - 1);
    rhs.row(N + 2) -= last_lower_[0] * rhs.row(N) + last_lower_[1] * rhs.row(N + 1);

    rhs.row(N + 2) /= diag_[N + 2];
    for (Eigen::Index r = N + 1; r >= 1; --r)
      rhs.row(r) = (rhs.row(r) - super_[r - 1] * rhs.row(r + 1)) / diag_[r];
    rhs.row(0) = (rhs.row(0) - first_[1] * rhs.row(1) - first_[2] * rhs.row(2)) / first_[0];
  }

  /// Solves A^T z = b in place; row r of A^{-1} is the solution for b = e_r.
  template <typename Vec>
  void solve_transposed_in_place(Vec& b) const {
    const std::size_t N = n_ - 1;
    // U^T w = b
    b[0] /= first_[0];
    b[1] = (b[1] - first_[1] * b[0]) / diag_[1];
    b[2] = (b[2] - first_[2] * b[0] - super_[0] * b[1]) / diag_[2];
    for (std::size_t c = 3; c <= N + 2; ++c) b[c] = (b[c] - super_[c - 2] * b[c - 1]) / diag_[c];
    // L^T z = w
    b[N + 1] -= last_lower_[1] * b[N + 2];
    b[N] -= sub_[N] * b[N + 1] + last_lower_[0] * b[N + 2];
    for (std::size_t c = N; c-- > 0;) b[c] -= sub_[c] * b[c + 1];
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inverse_row(std::size_t r) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(
        static_cast<Eigen::Index>(size()));
    e[static_cast<Eigen::Index>(r)] = Scalar(1);
    solve_transposed_in_place(e);
    return e;
  }

  /// Dense unit-lower factor, for inspection and tests.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lower() const {
    const Eigen::Index n = static_cast<Eigen::Index>(size());
    const Eigen::Index N = n - 3;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
    for (Eigen::Index r = 1; r <= N + 1; ++r) L(r, r - 1) = sub_[r - 1];
    L(N + 2, N) = last_lower_[0];
    L(N + 2, N + 1) = last_lower_[1];
    return L;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> upper() const {
    const Eigen::Index n = static_cast<Eigen::Index>(size());
    const Eigen::Index N = n - 3;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> U =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    U(0, 0) = first_[0];
    U(0, 1) = first_[1];
    U(0, 2) = first_[2];
    for (Eigen::Index r = 1; r <= N + 2; ++r) U(r, r) = diag_[r];
    for (Eigen::Index r = 1; r <= N + 1; ++r) U(r, r + 1) = super_[r - 1];
    return U;
  }

  // Entries in the d_i / l_i notation of the classical clamped factorization,
  // A = L (D/6) with D holding 6x the pivots (d_{N+2} scaled by h/3).
  Scalar d(std::size_t i) const {
    if (i == n_ + 1) return Scalar(2) * h_ * diag_[i];
    return Scalar(6) * diag_[i];
  }
  Scalar l(std::size_t i) const {
    if (i == n_) return last_lower_[1] * h_ / Scalar(3);
    return sub_[i];
  }
  /// L(N+2, N), the first of the two extra last-row multipliers.
  Scalar last_row_lower() const { return last_lower_[0]; }

 private:
  std::array<Scalar, 3> end_row_entries(EndRow kind) const {
    if (kind == EndRow::Clamped) {
      const Scalar c = Scalar(1) / (Scalar(2) * h_);
      return {-c, Scalar(0), c};
    }
    const Scalar c = Scalar(1) / (Scalar(6) * h_ * h_);
    return {c, Scalar(-2) * c, c};
  }

  std::size_t n_ = 0;
  Scalar h_ = 1;
  EndRow left_ = EndRow::Clamped;
  EndRow right_ = EndRow::Clamped;
  std::array<Scalar, 3> first_{};
  std::array<Scalar, 2> last_lower_{};
  std::vector<Scalar> diag_;
  std::vector<Scalar> sub_;
  std::vector<Scalar> super_;
};

/// Coefficients eta_{-1}..eta_{N+1} of a cubic spline on one axis.
template <typename Scalar = double>
struct SplineCoeffs {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta;
  Axis<Scalar> axis;
  BoundaryCondition bc;

  /// eta_nu for nu in [-1, N+1].
  Scalar operator()(long nu) const { return eta[static_cast<Eigen::Index>(nu + 1)]; }
  /// s'(x_i) = (eta_{i+1} - eta_{i-1}) / 2h.
  Scalar node_derivative(std::size_t i) const {
    const auto k = static_cast<long>(i);
    return ((*this)(k + 1) - (*this)(k - 1)) / (Scalar(2) * axis.spacing());
  }
};

template <typename Scalar>
SplineCoeffs<Scalar> solve_coeffs(std::span<const Scalar> samples, const BoundaryCondition& bc,
                                  const Axis<Scalar>& axis, const LUFactors<Scalar>& lu) {
  const std::size_t n = samples.size();
  if (n != axis.n_points())
    throw SizeError("sample count " + std::to_string(n) + " does not match axis with " +
                    std::to_string(axis.n_points()) + " nodes");
  SplineCoeffs<Scalar> out;
  out.axis = axis;
  out.bc = bc;
  out.eta.resize(static_cast<Eigen::Index>(n + 2));
  const bool natural = bc.kind == BoundaryCondition::Kind::Natural;
  out.eta[0] = natural ? Scalar(0) : static_cast<Scalar>(bc.phi_L);
  for (std::size_t i = 0; i < n; ++i) out.eta[static_cast<Eigen::Index>(i + 1)] = samples[i];
  out.eta[static_cast<Eigen::Index>(n + 1)] = natural ? Scalar(0) : static_cast<Scalar>(bc.phi_R);
  lu.solve_in_place(out.eta);
  return out;
}

/// Solves for the N+3 coefficients interpolating `samples` under `bc`.
template <typename Scalar>
SplineCoeffs<Scalar> solve_coeffs(std::span<const Scalar> samples, const BoundaryCondition& bc,
                                  const Axis<Scalar>& axis) {
  if (samples.size() < 4)
    throw SizeError("spline solve needs N >= 3 (at least 4 samples), got " +
                    std::to_string(samples.size()));
  const LUFactors<Scalar> lu(samples.size(), axis.spacing(), bc.end_row(), bc.end_row());
  return solve_coeffs(samples, bc, axis, lu);
}

namespace detail {
/// Interval index and local offset of x, or false when x lies outside [x_0, x_N].
template <typename Scalar>
bool locate(const Axis<Scalar>& axis, Scalar x, long& cell, Scalar& t) {
  const Scalar u = (x - axis.lo()) / axis.spacing();
  const Scalar N = static_cast<Scalar>(axis.intervals());
  const Scalar tol = Scalar(1e-12);
  if (!(u >= -tol && u <= N + tol)) return false;
  Scalar c = std::floor(u);
  if (c < 0) c = 0;
  if (c > N - 1) c = N - 1;
  cell = static_cast<long>(c);
  t = u - c;
  return true;
}
}  // namespace detail

/// s(x) inside [x_0, x_N]; zero outside (outflow convention).
template <typename Scalar>
Scalar eval_spline(const SplineCoeffs<Scalar>& coeffs, Scalar x) {
  long cell = 0;
  Scalar t = 0;
  if (!detail::locate(coeffs.axis, x, cell, t)) return Scalar(0);
  const auto w = cubic_weights(t);
  return w[0] * coeffs(cell - 1) + w[1] * coeffs(cell) + w[2] * coeffs(cell + 1) +
         w[3] * coeffs(cell + 2);
}

/**
 * Tensor-product cubic spline over a d-dimensional node-centered grid.
 * Coefficients are solved one axis at a time (the tensor-product system is
 * the Kronecker product of the 1-D systems).
 */
template <typename Scalar = double>
class TensorSpline {
 public:
  TensorSpline(std::vector<Axis<Scalar>> axes, std::span<const Scalar> values,
               std::vector<BoundaryCondition> bcs)
      : axes_(std::move(axes)) {
    if (bcs.size() != axes_.size())
      throw SizeError("tensor spline: one boundary condition per axis required");
    std::size_t total = 1;
    for (const auto& a : axes_) total *= a.n_points();
    if (values.size() != total)
      throw SizeError("tensor spline: value count " + std::to_string(values.size()) +
                      " does not match grid size " + std::to_string(total));
    for (const auto& bc : bcs)
      if (bc.kind == BoundaryCondition::Kind::Clamped && (bc.phi_L != 0.0 || bc.phi_R != 0.0))
        throw UnsupportedError("tensor spline supports Neumann or natural ends only");

    std::vector<std::size_t> shape;
    for (const auto& a : axes_) shape.push_back(a.n_points());
    std::vector<Scalar> data(values.begin(), values.end());

    for (std::size_t ax = 0; ax < axes_.size(); ++ax) {
      const std::size_t n = shape[ax];
      std::size_t outer = 1, inner = 1;
      for (std::size_t j = 0; j < ax; ++j) outer *= shape[j];
      for (std::size_t j = ax + 1; j < shape.size(); ++j) inner *= shape[j];
      const LUFactors<Scalar> lu(n, axes_[ax].spacing(), bcs[ax].end_row(), bcs[ax].end_row());
      std::vector<Scalar> next(outer * (n + 2) * inner);
      RowMajorArray<Scalar> block(static_cast<Eigen::Index>(n + 2),
                                  static_cast<Eigen::Index>(inner));
      for (std::size_t o = 0; o < outer; ++o) {
        block.row(0).setZero();
        block.row(static_cast<Eigen::Index>(n + 1)).setZero();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t c = 0; c < inner; ++c)
            block(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(c)) =
                data[(o * n + i) * inner + c];
        lu.solve_columns(block);
        for (std::size_t i = 0; i < n + 2; ++i)
          for (std::size_t c = 0; c < inner; ++c)
            next[(o * (n + 2) + i) * inner + c] =
                block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      }
      data = std::move(next);
      shape[ax] = n + 2;
    }
    coeff_shape_ = shape;
    coeffs_ = std::move(data);
  }

  std::size_t dim() const { return axes_.size(); }

  /// Separable evaluation: sum over the 4^d overlapping basis products.
  Scalar operator()(std::span<const Scalar> point) const {
    const std::size_t d = axes_.size();
    if (point.size() != d)
      throw SizeError("tensor spline: point has " + std::to_string(point.size()) +
                      " coordinates, spline has " + std::to_string(d) + " axes");
    std::vector<long> cell(d);
    std::vector<std::array<Scalar, 4>> w(d);
    for (std::size_t a = 0; a < d; ++a) {
      Scalar t = 0;
      if (!detail::locate(axes_[a], point[a], cell[a], t)) return Scalar(0);
      w[a] = cubic_weights(t);
    }
    Scalar sum = 0;
    std::vector<int> m(d, 0);
    const std::size_t terms = std::size_t(1) << (2 * d);
    for (std::size_t term = 0; term < terms; ++term) {
      std::size_t idx = 0;
      Scalar weight = 1;
      std::size_t code = term;
      for (std::size_t a = 0; a < d; ++a) {
        const int ma = static_cast<int>(code & 3u);
        code >>= 2;
        // coefficient eta_{cell-1+ma} sits at storage index cell+ma
        idx = idx * coeff_shape_[a] + static_cast<std::size_t>(cell[a] + ma);
        weight *= w[a][static_cast<std::size_t>(ma)];
      }
      sum += weight * coeffs_[idx];
    }
    return sum;
  }

 private:
  std::vector<Axis<Scalar>> axes_;
  std::vector<std::size_t> coeff_shape_;
  std::vector<Scalar> coeffs_;
};

/// Point evaluation of a tensor spline (free-function spelling).
template <typename Scalar>
Scalar eval_spline_tensor(const TensorSpline<Scalar>& spline, std::span<const Scalar> point) {
  return spline(point);
}

}  // namespace chasm
