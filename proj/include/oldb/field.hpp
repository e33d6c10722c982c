#pragma once

#include <Eigen/Core>

#include <complex>
#include <string>
#include <utility>

#include "oldb/errors.hpp"
#include "oldb/grid.hpp"

namespace oldb {

// Real-space samples of a scalar, vector, or tensor field: one row per grid
// point, one column per (packed) component.
template <typename Scalar = double>
class RealField {
 public:
  using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  RealField(GridPtr grid, Rank rank)
      : grid_(std::move(grid)), rank_(rank),
        samples_(Samples::Zero(grid_->size(), component_count(rank, grid_->dim()))) {}

  RealField(GridPtr grid, Rank rank, Samples samples)
      : grid_(std::move(grid)), rank_(rank), samples_(std::move(samples)) {
    if (samples_.rows() != grid_->size() ||
        samples_.cols() != component_count(rank_, grid_->dim()))
      throw DimensionError("real field samples do not match grid " +
                           std::to_string(grid_->points()) + "^" + std::to_string(grid_->dim()) +
                           " with rank " + to_string(rank_));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Rank rank() const { return rank_; }
  int components() const { return static_cast<int>(samples_.cols()); }

  const Samples& samples() const { return samples_; }
  Samples& samples() { return samples_; }

  // Physical coordinate of grid point `point` along `axis`.
  Scalar coordinate(Index point, int axis) const {
    const int n = grid_->dim();
    const int N = grid_->points();
    Index rem = point;
    int i = 0;
    for (int a = n - 1; a >= axis; --a) {
      i = static_cast<int>(rem % N);
      rem /= N;
    }
    return static_cast<Scalar>(grid_->spacing()) * static_cast<Scalar>(i);
  }

 private:
  GridPtr grid_;
  Rank rank_;
  Samples samples_;
};

// Fourier coefficients ĉ(ξ) of a field on the torus, normalised so that
// f(x) = Σ_ξ ĉ(ξ) e^{i ξ·x}. Rows are modes in FFT order, columns are
// packed components (see sym_index / tensor_index).
template <typename Scalar = double>
class SpectralField {
 public:
  using Complex = std::complex<Scalar>;
  using Coefficients = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  SpectralField(GridPtr grid, Rank rank, bool real = true)
      : grid_(std::move(grid)), rank_(rank), real_(real),
        coeffs_(Coefficients::Zero(grid_->size(), component_count(rank, grid_->dim()))) {}

  SpectralField(GridPtr grid, Rank rank, Coefficients coeffs, bool real = true)
      : grid_(std::move(grid)), rank_(rank), real_(real), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != grid_->size() ||
        coeffs_.cols() != component_count(rank_, grid_->dim()))
      throw DimensionError("spectral coefficients do not match grid and rank " +
                           std::string(to_string(rank_)));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dim() const { return grid_->dim(); }
  Rank rank() const { return rank_; }
  int components() const { return static_cast<int>(coeffs_.cols()); }
  bool real() const { return real_; }

  const Coefficients& coeffs() const { return coeffs_; }
  Coefficients& coeffs() { return coeffs_; }

  auto component(int c) { return coeffs_.col(c); }
  auto component(int c) const { return coeffs_.col(c); }

  SpectralField zeros_like() const { return SpectralField(grid_, rank_, real_); }

  SpectralField& operator+=(const SpectralField& other) {
    check_compatible(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& other) {
    check_compatible(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  SpectralField& operator*=(Scalar alpha) {
    coeffs_ *= alpha;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Scalar alpha, SpectralField a) { return a *= alpha; }
  friend SpectralField operator*(SpectralField a, Scalar alpha) { return a *= alpha; }
  SpectralField operator-() const { return SpectralField(grid_, rank_, -coeffs_, real_); }

  void check_compatible(const SpectralField& other) const {
    if (!(*grid_ == *other.grid_) || rank_ != other.rank_)
      throw DimensionError("incompatible fields: grid or rank differ");
  }

 private:
  GridPtr grid_;
  Rank rank_;
  bool real_;
  Coefficients coeffs_;
};

using Field = SpectralField<double>;
using PhysicalField = RealField<double>;

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DimensionError("fields live on different grids");
}

inline void require_rank(Rank actual, Rank expected, const char* what) {
  if (actual != expected)
    throw DimensionError(std::string(what) + ": expected " + to_string(expected) + " field, got " +
                         to_string(actual));
}

}  // namespace oldb
