#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "oldb/field.hpp"

namespace oldb {

namespace detail {

// FFT plans cache twiddles internally, so each thread owns its own engine.
template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine = [] {
    Eigen::FFT<Scalar> e;
    e.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return e;
  }();
  return engine;
}

// In-place unnormalised n-dimensional DFT of one component, row-major layout.
template <typename Scalar>
void fft_nd(std::complex<Scalar>* data, const Grid& grid, bool forward) {
  using Complex = std::complex<Scalar>;
  auto& fft = fft_engine<Scalar>();
  const int N = grid.points();
  const int n = grid.dim();
  const Index total = grid.size();
  thread_local std::vector<Complex> in, out;
  in.resize(N);
  out.resize(N);

  Index stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    const Index block = stride * N;
    for (Index base = 0; base < total; base += block) {
      for (Index offset = 0; offset < stride; ++offset) {
        Complex* line = data + base + offset;
        for (int i = 0; i < N; ++i) in[i] = line[i * stride];
        if (forward)
          fft.fwd(out.data(), in.data(), N);
        else
          fft.inv(out.data(), in.data(), N);
        for (int i = 0; i < N; ++i) line[i * stride] = out[i];
      }
    }
    stride *= N;
  }
}

}  // namespace detail

// Forward transform of real samples; normalised so that inverse_transform
// reproduces the samples exactly (up to rounding).
template <typename Scalar>
SpectralField<Scalar> transform(const RealField<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  SpectralField<Scalar> out(f.grid_ptr(), f.rank(), true);
  const Scalar scale = Scalar(1) / static_cast<Scalar>(f.grid().size());
  for (int c = 0; c < f.components(); ++c) {
    auto col = out.component(c);
    for (Index m = 0; m < col.size(); ++m) col(m) = Complex(f.samples()(m, c), 0);
    detail::fft_nd(col.data(), f.grid(), true);
    col *= scale;
  }
  return out;
}

template <typename Scalar>
SpectralField<Scalar> transform(GridPtr grid, Rank rank,
                                const typename RealField<Scalar>::Samples& samples) {
  return transform(RealField<Scalar>(std::move(grid), rank, samples));
}

// Inverse transform; keeps the real part (the imaginary part vanishes for
// conjugate-symmetric coefficients).
template <typename Scalar>
RealField<Scalar> inverse_transform(const SpectralField<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  RealField<Scalar> out(f.grid_ptr(), f.rank());
  std::vector<Complex> work(f.grid().size());
  for (int c = 0; c < f.components(); ++c) {
    auto col = f.component(c);
    for (Index m = 0; m < col.size(); ++m) work[m] = col(m);
    detail::fft_nd(work.data(), f.grid(), false);
    for (Index m = 0; m < col.size(); ++m) out.samples()(m, c) = work[m].real();
  }
  return out;
}

// Largest imaginary part produced by the inverse transform, relative to the
// largest real part. Zero (to rounding) for real fields.
template <typename Scalar>
Scalar imaginary_residual(const SpectralField<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  std::vector<Complex> work(f.grid().size());
  Scalar re = 0, im = 0;
  for (int c = 0; c < f.components(); ++c) {
    auto col = f.component(c);
    for (Index m = 0; m < col.size(); ++m) work[m] = col(m);
    detail::fft_nd(work.data(), f.grid(), false);
    for (const auto& z : work) {
      re = std::max(re, std::abs(z.real()));
      im = std::max(im, std::abs(z.imag()));
    }
  }
  return re > 0 ? im / re : im;
}

// max |ĉ(−ξ) − conj ĉ(ξ)| relative to max |ĉ|.
template <typename Scalar>
Scalar conjugate_symmetry_error(const SpectralField<Scalar>& f) {
  Scalar err = 0, scale = 0;
  const Grid& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    auto col = f.component(c);
    for (Index m = 0; m < g.size(); ++m) {
      err = std::max(err, std::abs(col(g.mirror(m)) - std::conj(col(m))));
      scale = std::max(scale, std::abs(col(m)));
    }
  }
  return scale > 0 ? err / scale : err;
}

}  // namespace oldb
