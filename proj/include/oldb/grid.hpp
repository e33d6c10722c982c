#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>

#include "oldb/errors.hpp"

namespace oldb {

using Index = Eigen::Index;

enum class Rank : std::uint8_t { Scalar = 0, Vector = 1, SymTensor = 2, Tensor = 3 };

inline const char* to_string(Rank rank) {
  switch (rank) {
    case Rank::Scalar: return "scalar";
    case Rank::Vector: return "vector";
    case Rank::SymTensor: return "sym-tensor";
    case Rank::Tensor: return "tensor";
  }
  return "unknown";
}

inline int component_count(Rank rank, int dim) {
  switch (rank) {
    case Rank::Scalar: return 1;
    case Rank::Vector: return dim;
    case Rank::SymTensor: return dim * (dim + 1) / 2;
    case Rank::Tensor: return dim * dim;
  }
  return 0;
}

// Packed upper-triangular column of entry (i, j) of a symmetric tensor.
// n=2: (0,0) (0,1) (1,1); n=3: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
inline int sym_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  return i * dim - i * (i - 1) / 2 + (j - i);
}

// Column of entry (i, j) of a full tensor, row-major.
inline int tensor_index(int i, int j, int dim) { return i * dim + j; }

// Weight of a packed component in Frobenius sums (off-diagonals appear twice).
inline double component_weight(Rank rank, int column, int dim) {
  if (rank != Rank::SymTensor) return 1.0;
  int c = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j, ++c)
      if (c == column) return i == j ? 1.0 : 2.0;
  return 1.0;
}

// Uniform periodic grid on [0, 2π)^n with N points per axis. Flat indices
// are row-major with axis 0 (x₁) slowest. Mode indices follow FFT order;
// the integer wavenumber of index i is i for i < N/2 and i − N otherwise.
class Grid {
 public:
  Grid(int dim, int points) : dim_(dim), points_(points) {
    if (dim != 2 && dim != 3) throw DimensionError("grid dimension must be 2 or 3");
    if (points < 8 || points % 2 != 0)
      throw DimensionError("points per axis must be even and >= 8, got " + std::to_string(points));

    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= points;

    for (int a = 0; a < dim; ++a) wavenumbers_[a].resize(size_);
    norm_sq_.resize(size_);
    mirror_.resize(size_);
    keep_.resize(size_);
    nyquist_.resize(size_);

    std::array<int, 3> idx{0, 0, 0};
    for (Index m = 0; m < size_; ++m) {
      Index rem = m;
      for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % points);
        rem /= points;
      }
      double r2 = 0.0;
      bool keep = true;
      bool nyq = false;
      Index mirror = 0;
      for (int a = 0; a < dim; ++a) {
        const int k = idx[a] < points / 2 ? idx[a] : idx[a] - points;
        wavenumbers_[a](m) = k;
        r2 += static_cast<double>(k) * k;
        // Two-thirds rule: retain 3|k| < N so triadic sums never wrap.
        if (3 * std::abs(k) >= points) keep = false;
        if (k == -points / 2) nyq = true;
        mirror = mirror * points + (points - idx[a]) % points;
      }
      norm_sq_(m) = r2;
      mirror_(m) = mirror;
      keep_(m) = keep;
      nyquist_(m) = nyq;
    }
    norm_ = norm_sq_.sqrt();
  }

  int dim() const { return dim_; }
  int points() const { return points_; }
  Index size() const { return size_; }

  double spacing() const { return 2.0 * std::numbers::pi / points_; }
  double volume() const { return std::pow(2.0 * std::numbers::pi, dim_); }

  const Eigen::ArrayXi& wavenumbers(int axis) const { return wavenumbers_[axis]; }
  int wavenumber(Index mode, int axis) const { return wavenumbers_[axis](mode); }

  const Eigen::ArrayXd& norm_sq() const { return norm_sq_; }
  const Eigen::ArrayXd& norm() const { return norm_; }

  Index mirror(Index mode) const { return mirror_(mode); }
  bool retained(Index mode) const { return keep_(mode); }
  bool nyquist(Index mode) const { return nyquist_(mode); }

  // Flat index of integer wavevector k (components reduced mod N).
  Index mode_index(const std::array<int, 3>& k) const {
    Index m = 0;
    for (int a = 0; a < dim_; ++a) m = m * points_ + ((k[a] % points_) + points_) % points_;
    return m;
  }

  // Largest |k_i| kept by the dealiasing rule.
  int retained_max() const { return (points_ - 1) / 3; }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && points_ == other.points_;
  }

 private:
  int dim_;
  int points_;
  Index size_ = 0;
  std::array<Eigen::ArrayXi, 3> wavenumbers_;
  Eigen::ArrayXd norm_sq_;
  Eigen::ArrayXd norm_;
  Eigen::Array<Index, Eigen::Dynamic, 1> mirror_;
  Eigen::Array<bool, Eigen::Dynamic, 1> keep_;
  Eigen::Array<bool, Eigen::Dynamic, 1> nyquist_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int dim, int points) { return std::make_shared<const Grid>(dim, points); }

}  // namespace oldb
