#include "chasm/par_spline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

namespace chasm {

const ClsHbcStencil& ClsHbcStencil::table() {
  static const ClsHbcStencil stencil = [] {
    ClsHbcStencil s{};
    s.weights_minus = {0.2214309755e-5,  -1.771447804e-5, 7.971515119e-5,  -3.011461267e-4,
                       1.113797807e-3,   -4.145187862e-3, 0.01546473933,   -0.05771376946,
                       0.2153903385,     -0.8038475846};
    for (std::size_t j = 1; j <= 10; ++j) s.weights_plus[j - 1] = -s.weights_minus[10 - j];
    return s;
  }();
  return stencil;
}

double cls_hbc_derivative(std::span<const double> left, std::span<const double> right, double h) {
  if (left.size() < 10 || right.size() < 10)
    throw SizeError("CLS-HBC stencil needs 10 samples on each side of the junction, got " +
                    std::to_string(left.size()) + " and " + std::to_string(right.size()));
  const auto& s = ClsHbcStencil::table();
  const std::size_t lo = left.size() - 10;
  double sum = 0.0;
  for (std::size_t m = 0; m < 10; ++m) sum += s.weights_minus[m] * left[lo + m];
  for (std::size_t m = 0; m < 10; ++m) sum += s.weights_plus[m] * right[m];
  return sum / h;
}

namespace {

using ClosureKey = std::tuple<std::size_t, std::size_t, std::size_t, int, std::size_t, std::uint64_t>;

std::mutex cache_mu;
std::map<ClosureKey, PmbcClosure> closure_cache;
PmbcCacheStats cache_stats;

PmbcClosure compute_closure(std::size_t M, std::size_t p, std::size_t n_nb, std::size_t J,
                            PmbcVariant variant, double h) {
  const std::size_t N = M * p;
  const EndRow row = variant == PmbcVariant::NaturalEnd ? EndRow::Natural : EndRow::Clamped;
  const LUFactors<double> lu(N + 1, h, row, row);
  // eta_{J-1} and eta_{J+1} sit in matrix rows J and J+2
  const Eigen::VectorXd before = lu.inverse_row(J);
  const Eigen::VectorXd after = lu.inverse_row(J + 2);
  const auto c = [&](long node) {
    const auto col = static_cast<Eigen::Index>(node + 1);
    return (-before[col] + after[col]) / (2.0 * h);
  };

  PmbcClosure out;
  out.n_nb = n_nb;
  out.junction_index = J;
  out.bc_variant = variant;
  out.c0 = c(static_cast<long>(J));
  const long Jl = static_cast<long>(J);
  for (std::size_t j = 1; j <= n_nb; ++j) {
    const long jl = static_cast<long>(j);
    if (J > 0) out.c_minus.push_back(c(Jl - jl));
    if (J < N) out.c_plus.push_back(c(Jl + jl));
  }
  return out;
}

}  // namespace

PmbcClosure build_pmbc_closure(std::size_t M, std::size_t p, std::size_t n_nb,
                               std::size_t junction, PmbcVariant variant, double h) {
  if (p < 1 || M < 1) throw ConfigError("PMBC closure needs M >= 1 and p >= 1");
  if (n_nb < 2) throw ConfigError("PMBC stencil half-length n_nb must be >= 2");
  if (n_nb > M)
    throw ConfigError("PMBC stencil half-length n_nb = " + std::to_string(n_nb) +
                      " exceeds patch size M = " + std::to_string(M));
  const std::size_t N = M * p;
  if (junction > N)
    throw ConfigError("junction index " + std::to_string(junction) + " outside 0.." +
                      std::to_string(N));
  const bool end = junction == 0 || junction == N;
  if (end && variant != PmbcVariant::NaturalEnd)
    throw ConfigError("domain-end closures exist only for the natural variant");
  if (!end && (junction < n_nb || junction + n_nb > N))
    throw ConfigError("PMBC stencil around junction " + std::to_string(junction) +
                      " leaves the grid");

  const ClosureKey key{N, p, n_nb, static_cast<int>(variant), junction,
                       std::bit_cast<std::uint64_t>(h)};
  {
    std::lock_guard lock(cache_mu);
    if (auto it = closure_cache.find(key); it != closure_cache.end()) {
      ++cache_stats.hits;
      return it->second;
    }
  }
  PmbcClosure closure = compute_closure(M, p, n_nb, junction, variant, h);
  std::lock_guard lock(cache_mu);
  ++cache_stats.misses;
  closure_cache.emplace(key, closure);
  return closure;
}

PmbcCacheStats pmbc_cache_stats() {
  std::lock_guard lock(cache_mu);
  return cache_stats;
}

double pmbc_left_partial(const PmbcClosure& closure, std::span<const double> samples) {
  const std::size_t n = closure.c_minus.size();
  if (samples.size() != n + 1)
    throw SizeError("left partial needs " + std::to_string(n + 1) + " samples, got " +
                    std::to_string(samples.size()));
  // at the right domain end the whole c0 belongs to the single patch
  const bool end = closure.c_plus.empty();
  double sum = (end ? 1.0 : 0.5) * closure.c0 * samples[n];
  for (std::size_t j = 1; j <= n; ++j) sum += closure.c_minus[j - 1] * samples[n - j];
  return sum;
}

double pmbc_right_partial(const PmbcClosure& closure, std::span<const double> samples) {
  const std::size_t n = closure.c_plus.size();
  if (samples.size() != n + 1)
    throw SizeError("right partial needs " + std::to_string(n + 1) + " samples, got " +
                    std::to_string(samples.size()));
  const bool end = closure.c_minus.empty();
  double sum = (end ? 1.0 : 0.5) * closure.c0 * samples[0];
  for (std::size_t j = 1; j <= n; ++j) sum += closure.c_plus[j - 1] * samples[j];
  return sum;
}

std::array<std::uint8_t, JunctionMessage::wire_size> JunctionMessage::encode() const {
  std::array<std::uint8_t, wire_size> out{};
  for (int b = 0; b < 4; ++b) out[b] = static_cast<std::uint8_t>(junction_index >> (8 * b));
  out[4] = static_cast<std::uint8_t>(direction);
  const auto bits = std::bit_cast<std::uint64_t>(partial_sum);
  for (int b = 0; b < 8; ++b) out[5 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  return out;
}

JunctionMessage JunctionMessage::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != wire_size)
    throw ExchangeError("junction message must be " + std::to_string(wire_size) +
                            " bytes, got " + std::to_string(bytes.size()),
                        0);
  JunctionMessage m;
  for (int b = 0; b < 4; ++b) m.junction_index |= std::uint32_t(bytes[b]) << (8 * b);
  if (bytes[4] > 1)
    throw ExchangeError("bad direction byte in message for junction " +
                            std::to_string(m.junction_index),
                        m.junction_index);
  m.direction = static_cast<Direction>(bytes[4]);
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= std::uint64_t(bytes[5 + b]) << (8 * b);
  m.partial_sum = std::bit_cast<double>(bits);
  return m;
}

double pmbc_boundary_value(const PmbcClosure&, double left_partial, double right_partial) {
  return left_partial + right_partial;
}

double pmbc_boundary_value(const PmbcClosure& closure, const JunctionMessage& from_left,
                           const JunctionMessage& from_right) {
  const auto J = static_cast<std::uint32_t>(closure.junction_index);
  for (const auto* m : {&from_left, &from_right})
    if (m->junction_index != J)
      throw ExchangeError("message for junction " + std::to_string(m->junction_index) +
                              " delivered to junction " + std::to_string(J),
                          J);
  if (from_left.direction != Direction::FromLeft || from_right.direction != Direction::FromRight)
    throw ExchangeError("junction " + std::to_string(J) + " received messages with wrong sides",
                        J);
  return pmbc_boundary_value(closure, from_left.partial_sum, from_right.partial_sum);
}

void Mailbox::post(JunctionPacket packet) {
  {
    std::lock_guard lock(mu_);
    const std::pair<std::uint32_t, int> key{packet.junction_index,
                                            static_cast<int>(packet.direction)};
    if (box_.count(key))
      throw ExchangeError("duplicate message for junction " +
                              std::to_string(packet.junction_index),
                          packet.junction_index);
    box_.emplace(key, std::move(packet));
  }
  ++posted_;
  cv_.notify_all();
}

JunctionPacket Mailbox::receive(std::uint32_t junction, Direction direction,
                                std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  const std::pair<std::uint32_t, int> key{junction, static_cast<int>(direction)};
  if (!cv_.wait_for(lock, timeout, [&] { return box_.count(key) > 0; }))
    throw ExchangeError("timed out waiting for " +
                            std::string(direction == Direction::FromLeft ? "left" : "right") +
                            " neighbor message at junction " + std::to_string(junction),
                        junction);
  auto node = box_.extract(key);
  return std::move(node.mapped());
}

PatchedLineSolver::PatchedLineSolver(const Axis<double>& axis, BoundaryCondition bc,
                                     ClosureConfig config)
    : axis_(axis), bc_(bc), config_(config) {
  if (axis.is_periodic()) throw ConfigError("spline lines need a node-centered axis");
  if (config.kind == ClosureKind::Serial && config.patches != 1)
    throw ConfigError("serial closure runs on a single patch, got patches = " +
                      std::to_string(config.patches));
  layout_ = make_patch_layout(axis.n_points(), config.patches);
  const std::size_t p = layout_.p;
  const std::size_t M = layout_.M;
  const double h = axis.spacing();
  const bool natural = bc.kind == BoundaryCondition::Kind::Natural;

  if (p == 1) {
    lu_.emplace_back(axis.n_points(), h, bc.end_row(), bc.end_row());
    return;
  }

  if (config.kind == ClosureKind::ClsHbc && M < 10)
    throw SizeError("stencil error: CLS-HBC needs at least 10 intervals per patch, got M = " +
                    std::to_string(M));
  if (config.kind == ClosureKind::Pmbc && (config.n_nb < 2 || config.n_nb > M))
    throw ConfigError("PMBC n_nb = " + std::to_string(config.n_nb) +
                      " must lie in [2, M] with M = " + std::to_string(M));

  for (std::size_t l = 0; l < p; ++l) {
    // CLS-HBC has no end formula, so natural ends keep their own rows
    const bool cls_natural = natural && config.kind == ClosureKind::ClsHbc;
    const EndRow left = (l == 0 && cls_natural) ? EndRow::Natural : EndRow::Clamped;
    const EndRow right = (l + 1 == p && cls_natural) ? EndRow::Natural : EndRow::Clamped;
    lu_.emplace_back(M + 1, h, left, right);
  }

  const PmbcVariant variant = natural ? PmbcVariant::NaturalEnd : PmbcVariant::Clamped;
  for (const std::size_t J : layout_.shared_junctions) {
    JunctionStencil s;
    s.junction = J;
    if (config.kind == ClosureKind::Pmbc) {
      const auto c = build_pmbc_closure(M, p, config.n_nb, J, variant, h);
      s.left.push_back(0.5 * c.c0);
      s.right.push_back(0.5 * c.c0);
      s.left.insert(s.left.end(), c.c_minus.begin(), c.c_minus.end());
      s.right.insert(s.right.end(), c.c_plus.begin(), c.c_plus.end());
    } else {
      const auto& t = ClsHbcStencil::table();
      s.left.push_back(0.0);
      s.right.push_back(0.0);
      for (std::size_t j = 1; j <= 10; ++j) {
        s.left.push_back(t.weights_minus[10 - j] / h);
        s.right.push_back(t.weights_plus[j - 1] / h);
      }
    }
    stencils_.push_back(std::move(s));
  }
  if (config.kind == ClosureKind::Pmbc && natural) {
    const std::size_t N = axis.intervals();
    const auto lc = build_pmbc_closure(M, p, config.n_nb, 0, variant, h);
    const auto rc = build_pmbc_closure(M, p, config.n_nb, N, variant, h);
    left_end_.push_back(lc.c0);
    left_end_.insert(left_end_.end(), lc.c_plus.begin(), lc.c_plus.end());
    right_end_.push_back(rc.c0);
    right_end_.insert(right_end_.end(), rc.c_minus.begin(), rc.c_minus.end());
  }
}

std::size_t PatchedLineSolver::solve(Eigen::Ref<const RowMajorArray<double>> samples,
                                     std::vector<RowMajorArray<double>>& coeffs, WorkerPool& pool,
                                     const ExchangeOptions& options) const {
  const std::size_t n = axis_.n_points();
  if (static_cast<std::size_t>(samples.rows()) != n)
    throw SizeError("line block has " + std::to_string(samples.rows()) + " rows, axis has " +
                    std::to_string(n) + " nodes");
  const Eigen::Index C = samples.cols();
  const std::size_t p = layout_.p;
  const std::size_t M = layout_.M;
  const bool natural = bc_.kind == BoundaryCondition::Kind::Natural;
  const double phi_L = natural ? 0.0 : bc_.phi_L;
  const double phi_R = natural ? 0.0 : bc_.phi_R;
  coeffs.resize(p);

  if (p == 1) {
    auto& block = coeffs[0];
    block.resize(static_cast<Eigen::Index>(n + 2), C);
    block.row(0).setConstant(phi_L);
    block.middleRows(1, static_cast<Eigen::Index>(n)) = samples;
    block.row(static_cast<Eigen::Index>(n + 1)).setConstant(phi_R);
    lu_[0].solve_columns(block);
    return 0;
  }

  const auto row = [&](std::size_t i) { return samples.row(static_cast<Eigen::Index>(i)); };
  const auto weighted = [&](const std::vector<double>& w, std::size_t J, bool leftward) {
    Eigen::Array<double, 1, Eigen::Dynamic> acc = w[0] * row(J);
    for (std::size_t j = 1; j < w.size(); ++j) acc += w[j] * row(leftward ? J - j : J + j);
    return acc;
  };

  Mailbox box;
  std::vector<Eigen::Array<double, 1, Eigen::Dynamic>> own_left(p), own_right(p);
  const auto send = [&](std::size_t J, Direction dir,
                        const Eigen::Array<double, 1, Eigen::Dynamic>& partial) {
    JunctionPacket packet{static_cast<std::uint32_t>(J), dir,
                          std::vector<double>(partial.data(), partial.data() + partial.size())};
    if (options.drop && options.drop(packet)) return;
    box.post(std::move(packet));
  };

  // round 1: every patch sends the partial sums it can form from its own samples
  pool.run(p, [&](std::size_t l) {
    if (l > 0) {
      const auto& s = stencils_[l - 1];
      own_right[l] = weighted(s.right, s.junction, false);
      send(s.junction, Direction::FromRight, own_right[l]);
    }
    if (l + 1 < p) {
      const auto& s = stencils_[l];
      own_left[l] = weighted(s.left, s.junction, true);
      send(s.junction, Direction::FromLeft, own_left[l]);
    }
  });

  // round 2: receive, close, solve
  pool.run(p, [&](std::size_t l) {
    auto& block = coeffs[l];
    block.resize(static_cast<Eigen::Index>(M + 3), C);
    const std::size_t first = layout_.patch_begin(l);
    block.middleRows(1, static_cast<Eigen::Index>(M + 1)) =
        samples.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(M + 1));

    if (l == 0) {
      if (!left_end_.empty())
        block.row(0) = weighted(left_end_, 0, false);
      else
        block.row(0).setConstant(phi_L);
    } else {
      const auto J = static_cast<std::uint32_t>(stencils_[l - 1].junction);
      const auto msg = box.receive(J, Direction::FromLeft, options.timeout);
      if (static_cast<Eigen::Index>(msg.partials.size()) != C)
        throw ExchangeError("partial count mismatch at junction " + std::to_string(J), J);
      const Eigen::Map<const Eigen::Array<double, 1, Eigen::Dynamic>> left(msg.partials.data(), C);
      block.row(0) = left + own_right[l];
    }

    const auto last = static_cast<Eigen::Index>(M + 2);
    if (l + 1 == p) {
      if (!right_end_.empty())
        block.row(last) = weighted(right_end_, axis_.intervals(), true);
      else
        block.row(last).setConstant(phi_R);
    } else {
      const auto J = static_cast<std::uint32_t>(stencils_[l].junction);
      const auto msg = box.receive(J, Direction::FromRight, options.timeout);
      if (static_cast<Eigen::Index>(msg.partials.size()) != C)
        throw ExchangeError("partial count mismatch at junction " + std::to_string(J), J);
      const Eigen::Map<const Eigen::Array<double, 1, Eigen::Dynamic>> right(msg.partials.data(),
                                                                            C);
      block.row(last) = own_left[l] + right;
    }
    // natural CLS end rows ask for a zero second difference
    if (lu_[l].left() == EndRow::Natural) block.row(0).setZero();
    if (lu_[l].right() == EndRow::Natural) block.row(last).setZero();
    lu_[l].solve_columns(block);
  });
  return box.posted();
}

SplineCoeffs<double> solve_patch_coeffs(std::span<const double> patch_samples, double phi_L,
                                        double phi_R, const Axis<double>& patch_axis) {
  return solve_coeffs(patch_samples, BoundaryCondition::clamped(phi_L, phi_R), patch_axis);
}

PatchedSpline::PatchedSpline(Axis<double> axis, PatchLayout layout,
                             std::vector<SplineCoeffs<double>> patches)
    : axis_(axis), layout_(std::move(layout)), patches_(std::move(patches)) {
  if (patches_.size() != layout_.p)
    throw SizeError("patched spline needs one coefficient set per patch");
}

double PatchedSpline::operator()(double x) const {
  long cell = 0;
  double t = 0;
  if (!detail::locate(axis_, x, cell, t)) return 0.0;
  const std::size_t l = layout_.patch_of_cell(static_cast<std::size_t>(cell));
  const long local = cell - static_cast<long>(layout_.patch_begin(l));
  const auto w = cubic_weights(t);
  const auto& c = patches_[l];
  return w[0] * c(local - 1) + w[1] * c(local) + w[2] * c(local + 1) + w[3] * c(local + 2);
}

double PatchedSpline::eta(std::size_t patch, long global_nu) const {
  return patches_.at(patch)(global_nu - static_cast<long>(layout_.patch_begin(patch)));
}

std::vector<double> coefficient_deviation(const PatchedSpline& patched,
                                          const SplineCoeffs<double>& global) {
  const auto& layout = patched.layout();
  if (layout.n_points + 2 != static_cast<std::size_t>(global.eta.size()))
    throw SizeError("patched and global splines have different node counts");
  std::vector<double> dev(layout.n_points + 2, 0.0);
  for (std::size_t l = 0; l < layout.p; ++l) {
    const auto b = static_cast<long>(layout.patch_begin(l));
    for (long nu = b - 1; nu <= b + static_cast<long>(layout.M) + 1; ++nu) {
      auto& d = dev[static_cast<std::size_t>(nu + 1)];
      d = std::max(d, std::abs(patched.eta(l, nu) - global(nu)));
    }
  }
  return dev;
}

PatchedSpline exchange_and_solve(std::span<const double> line, const Axis<double>& axis,
                                 const BoundaryCondition& bc, const ClosureConfig& config,
                                 std::size_t workers, const ExchangeOptions& options,
                                 std::size_t* messages) {
  if (line.size() != axis.n_points())
    throw SizeError("line has " + std::to_string(line.size()) + " samples, axis has " +
                    std::to_string(axis.n_points()) + " nodes");
  const PatchedLineSolver solver(axis, bc, config);
  WorkerPool pool(workers);
  const Eigen::Map<const RowMajorArray<double>> block(line.data(),
                                                      static_cast<Eigen::Index>(line.size()), 1);
  std::vector<RowMajorArray<double>> coeffs;
  const std::size_t sent = solver.solve(block, coeffs, pool, options);
  if (messages) *messages = sent;

  const auto& layout = solver.layout();
  const double h = axis.spacing();
  std::vector<SplineCoeffs<double>> out;
  for (std::size_t l = 0; l < layout.p; ++l) {
    const std::size_t first = layout.patch_begin(l);
    const std::size_t count = layout.p == 1 ? axis.n_points() : layout.M + 1;
    SplineCoeffs<double> c;
    c.axis = Axis<double>::node_centered(axis[first], axis[first + count - 1], count);
    c.eta = coeffs[l].col(0).matrix();
    c.bc = BoundaryCondition::clamped((c.eta[2] - c.eta[0]) / (2 * h),
                                      (c.eta[c.eta.size() - 1] - c.eta[c.eta.size() - 3]) / (2 * h));
    if (layout.p == 1) c.bc = bc;
    out.push_back(std::move(c));
  }
  return PatchedSpline(axis, layout, std::move(out));
}

}  // namespace chasm
