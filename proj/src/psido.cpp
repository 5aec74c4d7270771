#include "chasm/psido.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "chasm/errors.hpp"
#include "chasm/ndfft.hpp"

namespace chasm {

using cd = std::complex<double>;

Potential::Potential(Fn fn, std::vector<std::vector<double>> singular_points)
    : fn_(std::move(fn)), singular_(std::move(singular_points)) {}

Potential Potential::harmonic(double mass, double omega, std::vector<double> center) {
  if (!(omega > 0) || !(mass > 0)) throw ConfigError("harmonic potential needs mass, omega > 0");
  const double c = mass * omega;
  Potential V([c, center](std::span<const double> x) {
    double r2 = 0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double z = x[a] - (a < center.size() ? center[a] : 0.0);
      r2 += z * z;
    }
    return 0.5 * c * r2;
  });
  V.gradient_ = [c, center](std::span<const double> x, std::span<double> out) {
    for (std::size_t a = 0; a < x.size(); ++a)
      out[a] = c * (x[a] - (a < center.size() ? center[a] : 0.0));
  };
  return V;
}

Potential Potential::coulomb(double strength) {
  return Potential(
      [strength](std::span<const double> x) {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        return -strength / std::sqrt(r2);
      },
      {std::vector<double>{}});  // origin, sized lazily
}

Potential Potential::mollified_coulomb(double eps, double strength) {
  if (!(eps > 0)) throw ConfigError("mollification width must be positive");
  return Potential([eps, strength](std::span<const double> x) {
    double r2 = eps * eps;
    for (double v : x) r2 += v * v;
    return -strength / std::sqrt(r2);
  });
}

Potential Potential::constant(double c) {
  Potential V([c](std::span<const double>) { return c; });
  V.gradient_ = [](std::span<const double>, std::span<double> out) {
    for (double& g : out) g = 0.0;
  };
  return V;
}

Potential& Potential::with_policy(SingularPolicy policy, double delta_x) {
  policy_ = policy;
  delta_x_ = delta_x;
  return *this;
}

namespace {

bool hits(std::span<const double> z, const std::vector<double>& s) {
  for (std::size_t a = 0; a < z.size(); ++a) {
    const double c = a < s.size() ? s[a] : 0.0;
    if (std::abs(z[a] - c) > 1e-12) return false;
  }
  return true;
}

std::string describe(std::span<const double> z) {
  std::ostringstream os;
  os << "(";
  for (std::size_t a = 0; a < z.size(); ++a) os << (a ? ", " : "") << z[a];
  os << ")";
  return os.str();
}

}  // namespace

double Potential::operator()(std::span<const double> x) const {
  if (!fn_) throw ConfigError("potential has no evaluation function");
  double buf[8];
  std::vector<double> big;
  double* z = buf;
  if (x.size() > 8) {
    big.resize(x.size());
    z = big.data();
  }
  for (std::size_t a = 0; a < x.size(); ++a)
    z[a] = x[a] + (policy_ == SingularPolicy::GridShift ? delta_x_ : 0.0);
  const std::span<const double> zs(z, x.size());
  for (const auto& s : singular_) {
    if (!hits(zs, s)) continue;
    if (policy_ == SingularPolicy::ZeroAtSingularity) return 0.0;
    throw SingularityError("potential evaluated at its singular point " + describe(zs));
  }
  return fn_(zs);
}

double Potential::symbol(std::span<const double> x, std::span<const double> y) const {
  double plus[8], minus[8];
  if (x.size() > 8) throw UnsupportedError("potentials support at most 8 dimensions");
  for (std::size_t a = 0; a < x.size(); ++a) {
    plus[a] = x[a] + 0.5 * y[a];
    minus[a] = x[a] - 0.5 * y[a];
  }
  return (*this)(std::span<const double>(plus, x.size())) -
         (*this)(std::span<const double>(minus, x.size()));
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  if (!gradient_) throw UnsupportedError("local gradient path needs a quadratic potential");
  gradient_(x, out);
}

long SymbolTable::dual_index(std::size_t axis, std::size_t bin) const {
  const auto n = static_cast<long>(k_shape[axis]);
  const auto b = static_cast<long>(bin);
  return b < n / 2 ? b : b - n;
}

namespace {

void require_spectral_axes(const PhaseGrid& grid) {
  for (const auto& k : grid.k_axes)
    if (!k.is_periodic() || k.n_points() % 2 != 0)
      throw ConfigError("spectral k operations need periodic k axes with even N_k, got N_k = " +
                        std::to_string(k.n_points()));
}

/// Multi-index of FFT column `col` (row-major over k_shape).
void unravel(std::size_t col, const std::vector<std::size_t>& shape, std::vector<std::size_t>& idx) {
  for (std::size_t a = shape.size(); a-- > 0;) {
    idx[a] = col % shape[a];
    col /= shape[a];
  }
}

std::vector<double> x_point(const PhaseGrid& grid, std::size_t r) {
  const std::size_t d = grid.dim();
  std::vector<double> x(d);
  for (std::size_t a = d; a-- > 0;) {
    const std::size_t n = grid.x_axes[a].n_points();
    x[a] = grid.x_axes[a][r % n];
    r /= n;
  }
  return x;
}

/// Columns whose dual index hits -N/2 on any axis (their symbol is zeroed).
std::vector<char> nyquist_mask(const std::vector<std::size_t>& k_shape) {
  std::size_t K = 1;
  for (auto n : k_shape) K *= n;
  std::vector<char> mask(K, 0);
  std::vector<std::size_t> idx(k_shape.size());
  for (std::size_t c = 0; c < K; ++c) {
    unravel(c, k_shape, idx);
    for (std::size_t a = 0; a < k_shape.size(); ++a)
      if (idx[a] == k_shape[a] / 2) mask[c] = 1;
  }
  return mask;
}

void psm_row(const double* f, std::size_t r, const SymbolTable& t, const std::vector<char>& mask,
             NdFft& fft, std::vector<cd>& buf) {
  const std::size_t K = t.k_points();
  buf.assign(f, f + K);
  fft.forward(buf, t.k_shape);
  const cd scale(0.0, 1.0 / t.hbar);
  for (std::size_t c = 0; c < K; ++c)
    buf[c] = mask[c] ? cd(0.0) : buf[c] * (scale * t.d_v(static_cast<Eigen::Index>(r),
                                                             static_cast<Eigen::Index>(c)));
  fft.inverse(buf, t.k_shape);
}

}  // namespace

SymbolTable apply_singular_policy(const Potential& V, const PhaseGrid& grid) {
  require_spectral_axes(grid);
  SymbolTable t;
  t.hbar = grid.hbar;
  const std::size_t d = grid.dim();
  for (const auto& k : grid.k_axes) {
    t.k_shape.push_back(k.n_points());
    t.half_length.push_back(0.5 * k.length());
  }
  const std::size_t X = grid.x_size(), K = grid.k_size();
  t.d_v.resize(static_cast<Eigen::Index>(X), static_cast<Eigen::Index>(K));

  std::vector<std::vector<double>> y(K, std::vector<double>(d));
  std::vector<std::size_t> idx(d);
  for (std::size_t c = 0; c < K; ++c) {
    unravel(c, t.k_shape, idx);
    for (std::size_t a = 0; a < d; ++a)
      y[c][a] = std::numbers::pi * static_cast<double>(t.dual_index(a, idx[a])) / t.half_length[a];
  }
  for (std::size_t r = 0; r < X; ++r) {
    const auto x = x_point(grid, r);
    for (std::size_t c = 0; c < K; ++c)
      t.d_v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = V.symbol(x, y[c]);
  }
  return t;
}

namespace {

/// Flat column of the negated dual multi-index (-n on every axis).
std::vector<std::size_t> negated_columns(const std::vector<std::size_t>& k_shape) {
  std::size_t K = 1;
  for (auto n : k_shape) K *= n;
  std::vector<std::size_t> neg(K), idx(k_shape.size());
  for (std::size_t c = 0; c < K; ++c) {
    unravel(c, k_shape, idx);
    std::size_t m = 0;
    for (std::size_t a = 0; a < k_shape.size(); ++a)
      m = m * k_shape[a] + (k_shape[a] - idx[a]) % k_shape[a];
    neg[c] = m;
  }
  return neg;
}

}  // namespace

// D_V is odd in y, so i D_V / hbar maps real data to real data. Two rows then
// share one complex transform: g = f1 + i f2, split by conjugate symmetry.
Eigen::ArrayXd psm_apply(const Eigen::ArrayXd& f, const SymbolTable& symbols,
                         const PhaseGrid& grid, WorkerPool* pool) {
  require_spectral_axes(grid);
  const std::size_t X = symbols.x_points(), K = symbols.k_points();
  if (static_cast<std::size_t>(f.size()) != X * K || grid.size() != X * K)
    throw SizeError("field of " + std::to_string(f.size()) + " points does not match symbol table " +
                    std::to_string(X) + " x " + std::to_string(K));
  const auto mask = nyquist_mask(symbols.k_shape);
  const auto neg = negated_columns(symbols.k_shape);
  Eigen::ArrayXd out(f.size());
  const std::size_t pairs = (X + 1) / 2;
  const std::size_t workers = pool ? pool->size() : 1;
  const double s = 0.5 / symbols.hbar;
  const auto body = [&](std::size_t w) {
    thread_local NdFft fft;
    thread_local std::vector<cd> g, h;
    g.resize(K);
    h.resize(K);
    for (std::size_t q = pairs * w / workers; q < pairs * (w + 1) / workers; ++q) {
      const std::size_t r1 = 2 * q, r2 = std::min(2 * q + 1, X - 1);
      const bool single = r1 == r2;
      const double* f1 = f.data() + r1 * K;
      const double* f2 = f.data() + r2 * K;
      for (std::size_t c = 0; c < K; ++c) g[c] = cd(f1[c], single ? 0.0 : f2[c]);
      fft.forward(g, symbols.k_shape);
      const auto e1 = static_cast<Eigen::Index>(r1), e2 = static_cast<Eigen::Index>(r2);
      for (std::size_t c = 0; c < K; ++c) {
        if (mask[c]) {
          h[c] = 0.0;
          continue;
        }
        const cd G = g[c], Gm = std::conj(g[neg[c]]);
        // F1 = (G + Gm)/2, F2 = (G - Gm)/(2i); result M1 F1 + i M2 F2 with M = i D_V / hbar
        const double d1 = s * symbols.d_v(e1, static_cast<Eigen::Index>(c));
        const double d2 = single ? 0.0 : s * symbols.d_v(e2, static_cast<Eigen::Index>(c));
        h[c] = cd(0.0, d1) * (G + Gm) + cd(0.0, d2) * (G - Gm);
      }
      fft.inverse(h, symbols.k_shape);
      double* o1 = out.data() + r1 * K;
      double* o2 = out.data() + r2 * K;
      for (std::size_t c = 0; c < K; ++c) o1[c] = h[c].real();
      if (!single)
        for (std::size_t c = 0; c < K; ++c) o2[c] = h[c].imag();
    }
  };
  if (pool)
    pool->run(workers, body);
  else
    body(0);
  return out;
}

Eigen::ArrayXcd psm_apply_complex(const Eigen::ArrayXd& f, const SymbolTable& symbols,
                                  const PhaseGrid& grid) {
  require_spectral_axes(grid);
  const std::size_t X = symbols.x_points(), K = symbols.k_points();
  if (static_cast<std::size_t>(f.size()) != X * K)
    throw SizeError("field size does not match symbol table");
  const auto mask = nyquist_mask(symbols.k_shape);
  Eigen::ArrayXcd out(f.size());
  NdFft fft;
  std::vector<cd> buf;
  for (std::size_t r = 0; r < X; ++r) {
    psm_row(f.data() + r * K, r, symbols, mask, fft, buf);
    for (std::size_t c = 0; c < K; ++c) out[static_cast<Eigen::Index>(r * K + c)] = buf[c];
  }
  return out;
}

std::vector<double> psm_apply_slice(std::span<const double> f_slice, std::size_t x_index,
                                    const SymbolTable& symbols) {
  const std::size_t K = symbols.k_points();
  if (f_slice.size() != K)
    throw SizeError("k slice has " + std::to_string(f_slice.size()) + " values, expected " +
                    std::to_string(K));
  if (x_index >= symbols.x_points()) throw SizeError("x index outside symbol table");
  NdFft fft;
  std::vector<cd> buf;
  psm_row(f_slice.data(), x_index, symbols, nyquist_mask(symbols.k_shape), fft, buf);
  std::vector<double> out(K);
  for (std::size_t c = 0; c < K; ++c) out[c] = buf[c].real();
  return out;
}

namespace {

/// Applies A (rows: new extent, cols: old extent) along `axis` of a row-major tensor.
std::vector<cd> contract(const std::vector<cd>& in, std::vector<std::size_t>& shape,
                         std::size_t axis, const Eigen::MatrixXcd& A) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t j = 0; j < axis; ++j) outer *= shape[j];
  for (std::size_t j = axis + 1; j < shape.size(); ++j) inner *= shape[j];
  const std::size_t n_in = shape[axis];
  const auto n_out = static_cast<std::size_t>(A.rows());
  std::vector<cd> out(outer * n_out * inner, cd(0.0));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < n_out; ++r)
      for (std::size_t j = 0; j < n_in; ++j) {
        const cd a = A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        const cd* src = &in[(o * n_in + j) * inner];
        cd* dst = &out[(o * n_out + r) * inner];
        for (std::size_t s = 0; s < inner; ++s) dst[s] += a * src[s];
      }
  shape[axis] = n_out;
  return out;
}

}  // namespace

Eigen::ArrayXd quadrature_oracle(const Eigen::ArrayXd& f, const Potential& V,
                                 const PhaseGrid& grid) {
  require_spectral_axes(grid);
  constexpr std::size_t guard = 1000000;
  if (grid.size() > guard)
    throw SizeError("quadrature oracle refuses grids above " + std::to_string(guard) +
                    " points (got " + std::to_string(grid.size()) + ")");
  if (static_cast<std::size_t>(f.size()) != grid.size())
    throw SizeError("field size does not match grid");

  const std::size_t d = grid.dim();
  const std::size_t X = grid.x_size(), K = grid.k_size();
  std::vector<std::size_t> k_shape, y_shape;
  std::vector<Eigen::MatrixXcd> gather(d), scatter(d);
  std::vector<std::vector<double>> y_nodes(d);
  for (std::size_t a = 0; a < d; ++a) {
    const auto& ax = grid.k_axes[a];
    const std::size_t n = ax.n_points();
    const long half = static_cast<long>(n / 2);
    const double L = 0.5 * ax.length();
    k_shape.push_back(n);
    y_shape.push_back(n - 1);
    gather[a].resize(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n));
    scatter[a].resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n - 1));
    // open band |m| < n/2: the edge plane y_a = +-pi/dk is left out on every axis, since its
    // half-weight terms only cancel pairwise in one dimension
    for (long m = 1 - half; m < half; ++m) {
      const double y = std::numbers::pi * static_cast<double>(m) / L;
      y_nodes[a].push_back(y);
      const auto row = static_cast<Eigen::Index>(m + half - 1);
      for (std::size_t j = 0; j < n; ++j) {
        const double phase = ax[j] * y;
        gather[a](row, static_cast<Eigen::Index>(j)) = std::polar(1.0, phase);
        scatter[a](static_cast<Eigen::Index>(j), row) = std::polar(1.0, -phase);
      }
    }
  }
  std::size_t Y = 1;
  for (auto n : y_shape) Y *= n;
  std::vector<std::vector<double>> y(Y, std::vector<double>(d));
  std::vector<std::size_t> idx(d);
  for (std::size_t c = 0; c < Y; ++c) {
    unravel(c, y_shape, idx);
    for (std::size_t a = 0; a < d; ++a) y[c][a] = y_nodes[a][idx[a]];
  }

  const cd prefactor = 1.0 / (static_cast<double>(K) * cd(0.0, grid.hbar));
  Eigen::ArrayXd out(f.size());
  for (std::size_t r = 0; r < X; ++r) {
    const auto x = x_point(grid, r);
    std::vector<cd> t(f.data() + r * K, f.data() + (r + 1) * K);
    std::vector<std::size_t> shape = k_shape;
    for (std::size_t a = 0; a < d; ++a) t = contract(t, shape, a, gather[a]);
    for (std::size_t c = 0; c < Y; ++c) t[c] *= prefactor * V.symbol(x, y[c]);
    for (std::size_t a = 0; a < d; ++a) t = contract(t, shape, a, scatter[a]);
    for (std::size_t c = 0; c < K; ++c) out[static_cast<Eigen::Index>(r * K + c)] = t[c].real();
  }
  return out;
}

Eigen::ArrayXd local_gradient_apply(const Eigen::ArrayXd& f, const Potential& V,
                                    const PhaseGrid& grid) {
  if (!V.is_quadratic())
    throw UnsupportedError("local gradient path needs a quadratic potential");
  require_spectral_axes(grid);
  const std::size_t d = grid.dim();
  const std::size_t X = grid.x_size(), K = grid.k_size();
  if (static_cast<std::size_t>(f.size()) != X * K) throw SizeError("field size does not match grid");
  std::vector<std::size_t> k_shape;
  for (const auto& k : grid.k_axes) k_shape.push_back(k.n_points());

  // i pi n / L per column and axis; the unpaired -N/2 mode gets no derivative
  std::vector<std::vector<cd>> deriv(K, std::vector<cd>(d));
  std::vector<std::size_t> idx(d);
  for (std::size_t c = 0; c < K; ++c) {
    unravel(c, k_shape, idx);
    for (std::size_t a = 0; a < d; ++a) {
      const auto n = static_cast<long>(k_shape[a]);
      const auto b = static_cast<long>(idx[a]);
      const long m = b < n / 2 ? b : b - n;
      const double L = 0.5 * grid.k_axes[a].length();
      deriv[c][a] = b == n / 2 ? cd(0.0) : cd(0.0, std::numbers::pi * static_cast<double>(m) / L);
    }
  }

  Eigen::ArrayXd out(f.size());
  NdFft fft;
  std::vector<cd> buf;
  std::vector<double> g(d);
  for (std::size_t r = 0; r < X; ++r) {
    const auto x = x_point(grid, r);
    V.gradient(x, g);
    buf.assign(f.data() + r * K, f.data() + (r + 1) * K);
    fft.forward(buf, k_shape);
    for (std::size_t c = 0; c < K; ++c) {
      cd m(0.0);
      for (std::size_t a = 0; a < d; ++a) m += g[a] / grid.hbar * deriv[c][a];
      buf[c] *= m;
    }
    fft.inverse(buf, k_shape);
    for (std::size_t c = 0; c < K; ++c) out[static_cast<Eigen::Index>(r * K + c)] = buf[c].real();
  }
  return out;
}

PsmOperator::PsmOperator(const PhaseGrid& grid, const Potential& V, WorkerPool* pool)
    : grid_(grid), table_(apply_singular_policy(V, grid)), pool_(pool) {}

void PsmOperator::operator()(const Eigen::ArrayXd& f, Eigen::ArrayXd& out) const {
  out = psm_apply(f, table_, grid_, pool_);
}

}  // namespace chasm
