#pragma once

// Thin FFTW-backed real transforms on 1-D and 2-D periodic grids.

#include <complex>
#include <memory>
#include <vector>

namespace cyclicwave {

class RealFft {
 public:
  /// dim ∈ {1, 2}; points per axis.
  RealFft(int dim, int points);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  int dim() const noexcept;
  int points() const noexcept;
  std::size_t real_size() const noexcept;
  /// points^(dim−1)·(points/2 + 1)
  std::size_t complex_size() const noexcept;

  /// Unnormalized forward transform.
  void forward(const double* in, std::complex<double>* out);
  /// Unnormalized inverse; backward(forward(x)) = real_size()·x.
  void backward(const std::complex<double>* in, double* out);

  /// Signed integer wavenumber of row index i along a full axis.
  int wavenumber(int i) const noexcept { return i <= points() / 2 ? i : i - points(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cyclicwave
