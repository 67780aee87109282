#include "cyclicwave/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "cyclicwave/errors.hpp"
#include "cyclicwave/grid.hpp"

namespace cyclicwave {

namespace {

// planner calls are not thread-safe in FFTW; execution is
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Impl {
  int dim;
  int points;
  std::size_t nreal;
  std::size_t ncomplex;
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  Impl(int d, int p) : dim(d), points(p) {
    nreal = d == 1 ? static_cast<std::size_t>(p) : static_cast<std::size_t>(p) * p;
    ncomplex = (d == 1 ? 1 : static_cast<std::size_t>(p)) * (p / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    rbuf = fftw_alloc_real(nreal);
    cbuf = fftw_alloc_complex(ncomplex);
    if (d == 1) {
      fwd = fftw_plan_dft_r2c_1d(p, rbuf, cbuf, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_1d(p, cbuf, rbuf, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_r2c_2d(p, p, rbuf, cbuf, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_2d(p, p, cbuf, rbuf, FFTW_ESTIMATE);
    }
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }
};

RealFft::RealFft(int dim, int points) {
  if (dim != 1 && dim != 2) throw DomainError("spectral grids support dimension 1 or 2");
  if (points < 4 || (points & (points - 1)) != 0) throw DomainError("points per axis must be a power of two >= 4");
  impl_ = std::make_unique<Impl>(dim, points);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

int RealFft::dim() const noexcept { return impl_->dim; }
int RealFft::points() const noexcept { return impl_->points; }
std::size_t RealFft::real_size() const noexcept { return impl_->nreal; }
std::size_t RealFft::complex_size() const noexcept { return impl_->ncomplex; }

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::copy(in, in + impl_->nreal, impl_->rbuf);
  fftw_execute(impl_->fwd);
  const auto* c = reinterpret_cast<const std::complex<double>*>(impl_->cbuf);
  std::copy(c, c + impl_->ncomplex, out);
}

void RealFft::backward(const std::complex<double>* in, double* out) {
  std::copy(in, in + impl_->ncomplex, reinterpret_cast<std::complex<double>*>(impl_->cbuf));
  fftw_execute(impl_->bwd);  // c2r overwrites its input buffer, which is our copy
  std::copy(impl_->rbuf, impl_->rbuf + impl_->nreal, out);
}

void GridSpec::validate() const {
  if (n != 1 && n != 2) throw DomainError("grid dimension must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("torus side length must be positive");
  if (points < 4 || (points & (points - 1)) != 0) throw DomainError("points per axis must be a power of two >= 4");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and >= 0");
}

std::size_t GridSpec::size() const {
  return n == 1 ? static_cast<std::size_t>(points) : static_cast<std::size_t>(points) * points;
}

}  // namespace cyclicwave
