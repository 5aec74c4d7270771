#include "chasm/advection.hpp"

#include <cmath>

namespace chasm {

Advector::Advector(const PhaseGrid& grid, AdvectionOptions options)
    : grid_(grid), options_(options), pool_(std::make_unique<WorkerPool>(options.workers)) {
  for (const auto& axis : grid_.x_axes) solvers_.emplace_back(axis, options_.bc, options_.closure);
}

void Advector::shift(std::span<const Eigen::ArrayXd* const> in,
                     std::span<Eigen::ArrayXd* const> out, double tau) {
  if (in.size() != out.size()) throw SizeError("shift needs one output per input field");
  ++counters_.sweeps;
  counters_.fields += in.size();
  Eigen::ArrayXd scratch;
  for (std::size_t f = 0; f < in.size(); ++f) {
    if (static_cast<std::size_t>(in[f]->size()) != grid_.size())
      throw SizeError("field size " + std::to_string(in[f]->size()) + " does not match grid size " +
                      std::to_string(grid_.size()));
    Eigen::ArrayXd current = *in[f];
    for (std::size_t a = 0; a < grid_.dim(); ++a) {
      shift_axis(current, scratch, a, tau);
      current.swap(scratch);
    }
    *out[f] = std::move(current);
  }
}

Eigen::ArrayXd Advector::shifted(const Eigen::ArrayXd& f, double tau) {
  Eigen::ArrayXd out;
  const Eigen::ArrayXd* in[] = {&f};
  Eigen::ArrayXd* outs[] = {&out};
  shift(in, outs, tau);
  return out;
}

void Advector::shift_axis(const Eigen::ArrayXd& in, Eigen::ArrayXd& out, std::size_t a,
                          double tau) {
  const auto shape = grid_.shape();
  const std::size_t d = grid_.dim();
  const std::size_t n = shape[a];
  std::size_t outer = 1, inner = 1;
  for (std::size_t j = 0; j < a; ++j) outer *= shape[j];
  for (std::size_t j = a + 1; j < shape.size(); ++j) inner *= shape[j];
  std::size_t k_stride = 1;
  for (std::size_t j = d + a + 1; j < shape.size(); ++j) k_stride *= shape[j];
  const std::size_t nk = shape[d + a];

  const Axis<double>& axis = grid_.x_axes[a];
  const Axis<double>& kaxis = grid_.k_axes[a];
  const double h = axis.spacing();
  const auto N = static_cast<long>(axis.intervals());
  constexpr double tol = 1e-12;

  // every column has a single foot offset in grid units
  std::vector<long> offset(inner);
  std::vector<std::array<double, 4>> weight(inner);
  std::vector<double> frac(inner);
  for (std::size_t c = 0; c < inner; ++c) {
    const double k = kaxis[(c / k_stride) % nk];
    const double u = -grid_.hbar * k * tau / (grid_.mass * h);
    const double fl = std::floor(u);
    offset[c] = static_cast<long>(fl);
    frac[c] = u - fl;
    weight[c] = cubic_weights(frac[c]);
  }
  const auto at_zero = cubic_weights(0.0);
  const auto at_one = cubic_weights(1.0);

  out.resize(in.size());
  const PatchedLineSolver& solver = solvers_[a];
  const PatchLayout& layout = solver.layout();
  const std::size_t workers = pool_->size();
  const auto C = static_cast<Eigen::Index>(inner);

  std::vector<RowMajorArray<double>> coeffs;
  std::vector<std::vector<RowMajorArray<double>>> chunk_coeffs(workers);
  const auto chunk_begin = [&](std::size_t w) {
    return static_cast<Eigen::Index>(inner * w / workers);
  };

  for (std::size_t o = 0; o < outer; ++o) {
    const Eigen::Map<const RowMajorArray<double>> src(in.data() + o * n * inner,
                                                      static_cast<Eigen::Index>(n), C);
    Eigen::Map<RowMajorArray<double>> dst(out.data() + o * n * inner,
                                          static_cast<Eigen::Index>(n), C);

    const bool split_columns = layout.p == 1 && workers > 1;
    if (split_columns) {
      pool_->run(workers, [&](std::size_t w) {
        const Eigen::Index c0 = chunk_begin(w), c1 = chunk_begin(w + 1);
        if (c1 > c0) solver.solve(src.middleCols(c0, c1 - c0), chunk_coeffs[w], inline_pool_);
      });
    } else {
      counters_.messages += solver.solve(src, coeffs, *pool_);
    }

    const auto evaluate = [&](Eigen::Index c0, Eigen::Index c1,
                              const std::vector<RowMajorArray<double>>& blocks, Eigen::Index base) {
      for (long i = 0; i <= N; ++i) {
        for (Eigen::Index c = c0; c < c1; ++c) {
          const auto cu = static_cast<std::size_t>(c);
          long cell = i + offset[cu];
          const std::array<double, 4>* w = &weight[cu];
          if (cell < 0 || cell >= N) {
            if (cell == -1 && frac[cu] > 1.0 - tol) {
              cell = 0;
              w = &at_zero;
            } else if (cell == N && frac[cu] < tol) {
              cell = N - 1;
              w = &at_one;
            } else {
              dst(i, c) = 0.0;
              continue;
            }
          }
          const std::size_t l = layout.patch_of_cell(static_cast<std::size_t>(cell));
          const long local = cell - static_cast<long>(layout.patch_begin(l));
          const auto& b = blocks[l];
          const Eigen::Index cc = c - base;
          dst(i, c) = (*w)[0] * b(local, cc) + (*w)[1] * b(local + 1, cc) +
                      (*w)[2] * b(local + 2, cc) + (*w)[3] * b(local + 3, cc);
        }
      }
    };

    if (split_columns) {
      pool_->run(workers, [&](std::size_t w) {
        const Eigen::Index c0 = chunk_begin(w), c1 = chunk_begin(w + 1);
        if (c1 > c0) evaluate(c0, c1, chunk_coeffs[w], c0);
      });
    } else {
      pool_->run(workers, [&](std::size_t w) {
        const Eigen::Index c0 = chunk_begin(w), c1 = chunk_begin(w + 1);
        if (c1 > c0) evaluate(c0, c1, coeffs, 0);
      });
    }
  }
}

StateField advect(const StateField& f, double tau, Advector& advector) {
  StateField out = f;
  out.values = advector.shifted(f.values, tau);
  out.time = f.time + tau;
  return out;
}

}  // namespace chasm
