#pragma once

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <complex>
#include <vector>

namespace chasm {

/// Multi-dimensional FFT over a row-major complex block, one axis at a time.
/// The inverse includes the 1/n scaling. Not thread-safe; use one per worker.
class NdFft {
  using cd = std::complex<double>;

 public:
  void forward(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& shape) {
    run(data, shape, false);
  }
  void inverse(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& shape) {
    run(data, shape, true);
  }

 private:
  void run(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& shape,
           bool inv) {
    const std::size_t total = data.size();
    std::size_t stride = total;
    for (std::size_t ax = 0; ax < shape.size(); ++ax) {
      const std::size_t n = shape[ax];
      stride /= n;
      const std::size_t outer = total / (n * stride);
      a_.resize(n);
      b_.resize(n);
      if (stride == 1) {
        for (std::size_t o = 0; o < outer; ++o) {
          cd* line = data.data() + o * n;
          if (inv)
            fft_.inv(b_.data(), line, static_cast<Eigen::Index>(n));
          else
            fft_.fwd(b_.data(), line, static_cast<Eigen::Index>(n));
          std::copy(b_.begin(), b_.end(), line);
        }
        continue;
      }
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t s = 0; s < stride; ++s) {
          const std::size_t base = o * n * stride + s;
          for (std::size_t i = 0; i < n; ++i) a_[i] = data[base + i * stride];
          if (inv)
            fft_.inv(b_.data(), a_.data(), static_cast<Eigen::Index>(n));
          else
            fft_.fwd(b_.data(), a_.data(), static_cast<Eigen::Index>(n));
          for (std::size_t i = 0; i < n; ++i) data[base + i * stride] = b_[i];
        }
    }
  }

  Eigen::FFT<double> fft_;
  std::vector<std::complex<double>> a_, b_;
};

}  // namespace chasm
