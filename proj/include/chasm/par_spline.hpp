#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "chasm/grid.hpp"
#include "chasm/spline.hpp"
#include "chasm/workers.hpp"

namespace chasm {

enum class ClosureKind { Serial, ClsHbc, Pmbc };

/// Which global matrix the PMBC rows are taken from.
enum class PmbcVariant { Clamped, NaturalEnd };

/// Ten-point one-sided derivative weights for unit spacing; the plus side mirrors the minus side.
struct ClsHbcStencil {
  std::array<double, 10> weights_minus;  // omega_{-10} .. omega_{-1}
  std::array<double, 10> weights_plus;   // omega_{1} .. omega_{10}

  static const ClsHbcStencil& table();
};

/**
 * s'(x_i) from phi(x_{i-10})..phi(x_{i-1}) and phi(x_{i+1})..phi(x_{i+10}).
 * The tabulated weights are for unit spacing and are divided by h here.
 */
double cls_hbc_derivative(std::span<const double> left, std::span<const double> right,
                          double h = 1.0);

struct PmbcClosure {
  std::size_t n_nb = 0;
  double c0 = 0.0;
  std::vector<double> c_minus;  // c_j^-, j = 1..n_nb (empty at the right domain end)
  std::vector<double> c_plus;   // c_j^+, j = 1..n_nb (empty at the left domain end)
  std::size_t junction_index = 0;
  PmbcVariant bc_variant = PmbcVariant::Clamped;
};

/**
 * Junction closure from truncated rows of the global inverse spline matrix.
 *
 * The global system has N = M*p intervals of spacing h. `junction` is a node
 * index: lM for an interior junction, or 0 / N for the domain-end closures of
 * the natural variant. Results are cached per (N, p, n_nb, variant, junction, h).
 */
PmbcClosure build_pmbc_closure(std::size_t M, std::size_t p, std::size_t n_nb,
                               std::size_t junction, PmbcVariant variant, double h = 1.0);

struct PmbcCacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
};
PmbcCacheStats pmbc_cache_stats();

/// Left partial: 1/2 c0 phi_J + sum_j c_j^- phi_{J-j}; `samples` is phi_{J-n_nb}..phi_J.
double pmbc_left_partial(const PmbcClosure& closure, std::span<const double> samples);
/// Right partial: 1/2 c0 phi_J + sum_j c_j^+ phi_{J+j}; `samples` is phi_J..phi_{J+n_nb}.
double pmbc_right_partial(const PmbcClosure& closure, std::span<const double> samples);

enum class Direction : std::uint8_t { FromLeft = 0, FromRight = 1 };

struct JunctionMessage {
  std::uint32_t junction_index = 0;
  Direction direction = Direction::FromLeft;
  double partial_sum = 0.0;

  static constexpr std::size_t wire_size = 13;
  /// Little-endian {u32 junction_index, u8 direction, f64 partial_sum}.
  std::array<std::uint8_t, wire_size> encode() const;
  static JunctionMessage decode(std::span<const std::uint8_t> bytes);
};

double pmbc_boundary_value(const PmbcClosure& closure, double left_partial, double right_partial);
/// Checks that both messages belong to this junction and come from opposite sides.
double pmbc_boundary_value(const PmbcClosure& closure, const JunctionMessage& from_left,
                           const JunctionMessage& from_right);

/// Partial sums for a batch of lines crossing one junction; element c is one JunctionMessage.
struct JunctionPacket {
  std::uint32_t junction_index = 0;
  Direction direction = Direction::FromLeft;
  std::vector<double> partials;

  JunctionMessage message(std::size_t line) const {
    return {junction_index, direction, partials.at(line)};
  }
};

/// Value-only message store for one exchange round.
class Mailbox {
 public:
  void post(JunctionPacket packet);
  /// Blocks until the packet arrives; throws ExchangeError naming the junction on timeout.
  JunctionPacket receive(std::uint32_t junction, Direction direction,
                         std::chrono::milliseconds timeout);
  std::size_t posted() const { return posted_.load(); }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<std::uint32_t, int>, JunctionPacket> box_;
  std::atomic<std::size_t> posted_{0};
};

struct ClosureConfig {
  ClosureKind kind = ClosureKind::Serial;
  std::size_t patches = 1;
  std::size_t n_nb = 10;
};

struct ExchangeOptions {
  std::chrono::milliseconds timeout{10000};
  /// Test hook: packets for which this returns true are never delivered.
  std::function<bool(const JunctionPacket&)> drop;
};

/// Effective boundary value = sum_j left[j] phi_{J-j} + sum_j right[j] phi_{J+j}.
struct JunctionStencil {
  std::size_t junction = 0;
  std::vector<double> left;
  std::vector<double> right;
};

/**
 * Coefficient solver for lines along one axis, serial or split into patches.
 *
 * Patch l covers nodes lM..(l+1)M and gets its own (M+3)-coefficient clamped
 * system; junction slopes come from the configured closure. Lines are solved
 * in batches: a block of samples (n_points x C) yields one (M+3) x C
 * coefficient block per patch.
 */
class PatchedLineSolver {
 public:
  PatchedLineSolver(const Axis<double>& axis, BoundaryCondition bc, ClosureConfig config);

  const Axis<double>& axis() const { return axis_; }
  const PatchLayout& layout() const { return layout_; }
  const ClosureConfig& config() const { return config_; }
  std::size_t patches() const { return layout_.p; }
  const std::vector<JunctionStencil>& stencils() const { return stencils_; }

  /// Solves a batch; returns the number of junction packets exchanged.
  std::size_t solve(Eigen::Ref<const RowMajorArray<double>> samples,
                    std::vector<RowMajorArray<double>>& coeffs, WorkerPool& pool,
                    const ExchangeOptions& options = {}) const;

 private:
  Axis<double> axis_;
  BoundaryCondition bc_;
  ClosureConfig config_;
  PatchLayout layout_;
  std::vector<LUFactors<double>> lu_;       // one per patch
  std::vector<JunctionStencil> stencils_;  // interior junctions, in order
  // natural-end PMBC closures turned into clamped slopes (empty otherwise)
  std::vector<double> left_end_;
  std::vector<double> right_end_;
};

/// Clamped solve of one patch: M+1 samples, junction slopes phi_L and phi_R.
SplineCoeffs<double> solve_patch_coeffs(std::span<const double> patch_samples, double phi_L,
                                        double phi_R, const Axis<double>& patch_axis);

/// Decomposed spline of one line: per-patch coefficients plus the layout to pick them.
class PatchedSpline {
 public:
  PatchedSpline(Axis<double> axis, PatchLayout layout, std::vector<SplineCoeffs<double>> patches);

  const std::vector<SplineCoeffs<double>>& patches() const { return patches_; }
  const PatchLayout& layout() const { return layout_; }
  /// Evaluation with the coefficients of the patch containing x; 0 outside the axis.
  double operator()(double x) const;
  /// Local eta of the patch containing node i, read at global index nu (in that patch's range).
  double eta(std::size_t patch, long global_nu) const;

 private:
  Axis<double> axis_;
  PatchLayout layout_;
  std::vector<SplineCoeffs<double>> patches_;
};

/// |eta_patch - eta_global| per global index -1..N+1, worst over the patches covering it.
std::vector<double> coefficient_deviation(const PatchedSpline& patched,
                                          const SplineCoeffs<double>& global);

/// One exchange round plus independent patch solves for a single line.
PatchedSpline exchange_and_solve(std::span<const double> line, const Axis<double>& axis,
                                 const BoundaryCondition& bc, const ClosureConfig& config,
                                 std::size_t workers = 1, const ExchangeOptions& options = {},
                                 std::size_t* messages = nullptr);

}  // namespace chasm
