#pragma once

#include <cmath>
#include <random>

#include "oldb/operators.hpp"

namespace oldb {

// Random real field with independent complex Gaussian coefficients on the
// shell k_min ≤ |ξ| ≤ k_max, scaled by |ξ|^{-decay}. Wavevectors are visited
// in a fixed lexicographic order over [−K, K]^n, independent of N, so one seed
// yields the same field on every grid that resolves the band.
template <typename Scalar = double, typename URBG>
SpectralField<Scalar> random_band_field(GridPtr grid, Rank rank, double k_min, double k_max, URBG& rng,
                                        double decay = 0.0) {
  if (!(k_min >= 0.0) || !(k_max >= k_min)) throw ParameterError("invalid random band");
  const int K = static_cast<int>(std::floor(k_max));
  if (K >= grid->points() / 2) throw ParameterError("random band exceeds the grid Nyquist frequency");
  const int n = grid->dim();
  SpectralField<Scalar> f(grid, rank, true);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<int, 3> k{0, 0, 0};
  const int width = 2 * K + 1;
  long total = 1;
  for (int a = 0; a < n; ++a) total *= width;
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rem % width) - K;
      rem /= width;
    }
    int lead = 0;
    for (int a = 0; a < n && lead == 0; ++a) lead = k[a];
    if (lead <= 0) continue;  // one representative per ±ξ pair, ξ ≠ 0
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += double(k[a]) * k[a];
    const double r = std::sqrt(r2);
    if (r < k_min || r > k_max) continue;
    const double weight = std::pow(r, -decay) / std::sqrt(2.0);
    const Index m = grid->mode_index(k);
    const Index mm = grid->mirror(m);
    for (int c = 0; c < f.components(); ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      const std::complex<Scalar> z(static_cast<Scalar>(weight * re), static_cast<Scalar>(weight * im));
      f.coeffs()(m, c) = z;
      f.coeffs()(mm, c) = std::conj(z);
    }
  }
  return f;
}

// Divergence-free random velocity with unit L² norm (zero if the band is empty).
template <typename Scalar = double, typename URBG>
SpectralField<Scalar> random_solenoidal_field(GridPtr grid, double k_min, double k_max, URBG& rng,
                                              double decay = 0.0) {
  SpectralField<Scalar> u = leray_project(random_band_field<Scalar>(grid, Rank::Vector, k_min, k_max, rng, decay));
  const Scalar norm = l2_norm(u);
  if (norm > 0) u *= Scalar(1) / norm;
  return u;
}

}  // namespace oldb
