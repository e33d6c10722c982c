#pragma once

#include <cmath>
#include <utility>

#include "oldb/transform.hpp"

namespace oldb {

namespace detail {

// i·k_axis, with the Nyquist wavenumber mapped to zero so that derivatives
// of real fields stay real.
template <typename Scalar>
std::complex<Scalar> ik(const Grid& g, Index mode, int axis) {
  const int k = g.wavenumber(mode, axis);
  if (k == -g.points() / 2) return {0, 0};
  return {0, static_cast<Scalar>(k)};
}

}  // namespace detail

// Zero every mode outside the two-thirds retained set.
template <typename Scalar>
SpectralField<Scalar> dealias(SpectralField<Scalar> f) {
  const Grid& g = f.grid();
  for (Index m = 0; m < g.size(); ++m)
    if (!g.retained(m)) f.coeffs().row(m).setZero();
  return f;
}

template <typename Scalar>
SpectralField<Scalar> derivative(const SpectralField<Scalar>& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw DimensionError("derivative axis out of range");
  SpectralField<Scalar> out = f;
  const Grid& g = f.grid();
  for (Index m = 0; m < g.size(); ++m) out.coeffs().row(m) *= detail::ik<Scalar>(g, m, axis);
  return out;
}

// scalar -> vector (∂_i f); vector -> tensor with entry (i, j) = ∂_j u_i.
template <typename Scalar>
SpectralField<Scalar> gradient(const SpectralField<Scalar>& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  if (f.rank() == Rank::Scalar) {
    SpectralField<Scalar> out(f.grid_ptr(), Rank::Vector, f.real());
    for (int a = 0; a < n; ++a)
      for (Index m = 0; m < g.size(); ++m)
        out.coeffs()(m, a) = detail::ik<Scalar>(g, m, a) * f.coeffs()(m, 0);
    return out;
  }
  require_rank(f.rank(), Rank::Vector, "gradient");
  SpectralField<Scalar> out(f.grid_ptr(), Rank::Tensor, f.real());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (Index m = 0; m < g.size(); ++m)
        out.coeffs()(m, tensor_index(i, j, n)) = detail::ik<Scalar>(g, m, j) * f.coeffs()(m, i);
  return out;
}

// vector -> scalar; (sym-)tensor -> vector with (div τ)_i = ∂_j τ_ij.
template <typename Scalar>
SpectralField<Scalar> divergence(const SpectralField<Scalar>& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  if (f.rank() == Rank::Vector) {
    SpectralField<Scalar> out(f.grid_ptr(), Rank::Scalar, f.real());
    for (int a = 0; a < n; ++a)
      for (Index m = 0; m < g.size(); ++m)
        out.coeffs()(m, 0) += detail::ik<Scalar>(g, m, a) * f.coeffs()(m, a);
    return out;
  }
  if (f.rank() != Rank::SymTensor && f.rank() != Rank::Tensor)
    throw DimensionError("divergence needs a vector or tensor field");
  const bool sym = f.rank() == Rank::SymTensor;
  SpectralField<Scalar> out(f.grid_ptr(), Rank::Vector, f.real());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int col = sym ? sym_index(i, j, n) : tensor_index(i, j, n);
      for (Index m = 0; m < g.size(); ++m)
        out.coeffs()(m, i) += detail::ik<Scalar>(g, m, j) * f.coeffs()(m, col);
    }
  return out;
}

template <typename Scalar>
SpectralField<Scalar> laplacian(const SpectralField<Scalar>& f) {
  SpectralField<Scalar> out = f;
  const auto& r2 = f.grid().norm_sq();
  for (Index m = 0; m < r2.size(); ++m) out.coeffs().row(m) *= -static_cast<Scalar>(r2(m));
  return out;
}

// Leray projector: v̂ − ξ(ξ·v̂)/|ξ|² per nonzero mode, mean passed through.
template <typename Scalar>
SpectralField<Scalar> leray_project(const SpectralField<Scalar>& v) {
  require_rank(v.rank(), Rank::Vector, "leray_project");
  const Grid& g = v.grid();
  const int n = g.dim();
  SpectralField<Scalar> out = v;
  for (Index m = 0; m < g.size(); ++m) {
    const double r2 = g.norm_sq()(m);
    if (r2 == 0.0) continue;
    std::complex<Scalar> dot(0, 0);
    for (int a = 0; a < n; ++a) dot += static_cast<Scalar>(g.wavenumber(m, a)) * v.coeffs()(m, a);
    dot /= static_cast<Scalar>(r2);
    for (int a = 0; a < n; ++a)
      out.coeffs()(m, a) -= static_cast<Scalar>(g.wavenumber(m, a)) * dot;
  }
  return out;
}

// Root-mean-square coefficient magnitude over all components.
template <typename Scalar>
Scalar coefficient_norm(const SpectralField<Scalar>& f) {
  return f.coeffs().norm();
}

// Λ^s = (−Δ)^{s/2}: multiply each mode by |ξ|^s. For s < 0 the mean must
// vanish; the zero mode of the result is always zero for s ≠ 0.
template <typename Scalar>
SpectralField<Scalar> lambda_power(const SpectralField<Scalar>& f, Scalar s) {
  if (s == Scalar(0)) return f;
  const Grid& g = f.grid();
  const Index zero = 0;  // ξ = 0 is the first mode in FFT order
  if (s < 0) {
    const Scalar mean = f.coeffs().row(zero).norm();
    if (mean > Scalar(1e-12) * coefficient_norm(f))
      throw DegenerateInputError("Λ^s with s < 0 applied to a field with nonzero mean");
  }
  SpectralField<Scalar> out = f;
  for (Index m = 0; m < g.size(); ++m) {
    const double r = g.norm()(m);
    out.coeffs().row(m) *= (r == 0.0) ? Scalar(0) : static_cast<Scalar>(std::pow(r, s));
  }
  return out;
}

// Symmetric and skew parts of ∇u: D = (∇u + ∇uᵀ)/2 (packed), Ω = (∇u − ∇uᵀ)/2.
template <typename Scalar>
std::pair<SpectralField<Scalar>, SpectralField<Scalar>> sym_skew_parts(
    const SpectralField<Scalar>& u) {
  require_rank(u.rank(), Rank::Vector, "sym_skew_parts");
  const int n = u.dim();
  const SpectralField<Scalar> grad = gradient(u);
  SpectralField<Scalar> sym(u.grid_ptr(), Rank::SymTensor, u.real());
  SpectralField<Scalar> skew(u.grid_ptr(), Rank::Tensor, u.real());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto gij = grad.component(tensor_index(i, j, n));
      auto gji = grad.component(tensor_index(j, i, n));
      if (i <= j) sym.component(sym_index(i, j, n)) = (gij + gji) * Scalar(0.5);
      skew.component(tensor_index(i, j, n)) = (gij - gji) * Scalar(0.5);
    }
  return {std::move(sym), std::move(skew)};
}

template <typename Scalar>
SpectralField<Scalar> symmetric_gradient(const SpectralField<Scalar>& u) {
  return sym_skew_parts(u).first;
}

// Expand a packed symmetric tensor to full n×n storage.
template <typename Scalar>
SpectralField<Scalar> to_full_tensor(const SpectralField<Scalar>& tau) {
  if (tau.rank() == Rank::Tensor) return tau;
  require_rank(tau.rank(), Rank::SymTensor, "to_full_tensor");
  const int n = tau.dim();
  SpectralField<Scalar> out(tau.grid_ptr(), Rank::Tensor, tau.real());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.component(tensor_index(i, j, n)) = tau.component(sym_index(i, j, n));
  return out;
}

// L² inner product on the torus, ⟨f, g⟩ = ∫ f·g dx (Frobenius for tensors).
template <typename Scalar>
Scalar inner_product(const SpectralField<Scalar>& f, const SpectralField<Scalar>& g) {
  f.check_compatible(g);
  Scalar sum = 0;
  for (int c = 0; c < f.components(); ++c) {
    const Scalar w = static_cast<Scalar>(component_weight(f.rank(), c, f.dim()));
    sum += w * (f.component(c).array() * g.component(c).array().conjugate()).real().sum();
  }
  return sum * static_cast<Scalar>(f.grid().volume());
}

template <typename Scalar>
Scalar l2_norm(const SpectralField<Scalar>& f) {
  Scalar sum = 0;
  for (int c = 0; c < f.components(); ++c)
    sum += static_cast<Scalar>(component_weight(f.rank(), c, f.dim())) *
           f.component(c).squaredNorm();
  return std::sqrt(sum * static_cast<Scalar>(f.grid().volume()));
}

// Largest |ξ·v̂(ξ)| relative to the largest |ξ||v̂(ξ)|.
template <typename Scalar>
Scalar divergence_residual(const SpectralField<Scalar>& v) {
  require_rank(v.rank(), Rank::Vector, "divergence_residual");
  const Grid& g = v.grid();
  Scalar div = 0, scale = 0;
  for (Index m = 0; m < g.size(); ++m) {
    std::complex<Scalar> d(0, 0);
    for (int a = 0; a < g.dim(); ++a) d += static_cast<Scalar>(g.wavenumber(m, a)) * v.coeffs()(m, a);
    div = std::max(div, std::abs(d));
    scale = std::max(scale, static_cast<Scalar>(g.norm()(m)) * v.coeffs().row(m).norm());
  }
  return scale > 0 ? div / scale : div;
}

// Pointwise magnitude (Euclidean / Frobenius) of real samples.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> pointwise_magnitude(const RealField<Scalar>& f) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> acc =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(f.grid().size());
  const int n = f.grid().dim();
  for (int c = 0; c < f.components(); ++c)
    acc += static_cast<Scalar>(component_weight(f.rank(), c, n)) * f.samples().col(c).array().square();
  return acc.sqrt();
}

// Dealiased transport term u·∇z, applied componentwise to z of any rank.
template <typename Scalar>
SpectralField<Scalar> advect(const SpectralField<Scalar>& u, const SpectralField<Scalar>& z) {
  require_rank(u.rank(), Rank::Vector, "advect");
  require_same_grid(u.grid(), z.grid());
  const int n = u.dim();
  const RealField<Scalar> u_phys = inverse_transform(u);
  typename RealField<Scalar>::Samples acc =
      RealField<Scalar>::Samples::Zero(u.grid().size(), z.components());
  for (int a = 0; a < n; ++a) {
    const RealField<Scalar> dz = inverse_transform(derivative(z, a));
    acc += (dz.samples().array().colwise() * u_phys.samples().col(a).array()).matrix();
  }
  return dealias(transform(RealField<Scalar>(z.grid_ptr(), z.rank(), std::move(acc))));
}

// Dealiased pointwise product of two scalar fields.
template <typename Scalar>
SpectralField<Scalar> multiply(const SpectralField<Scalar>& f, const SpectralField<Scalar>& g) {
  require_rank(f.rank(), Rank::Scalar, "multiply");
  require_rank(g.rank(), Rank::Scalar, "multiply");
  const RealField<Scalar> a = inverse_transform(f);
  const RealField<Scalar> b = inverse_transform(g);
  typename RealField<Scalar>::Samples prod = (a.samples().array() * b.samples().array()).matrix();
  return dealias(transform(RealField<Scalar>(f.grid_ptr(), Rank::Scalar, std::move(prod))));
}

// Mean (ξ = 0 coefficient) removed.
template <typename Scalar>
SpectralField<Scalar> remove_mean(SpectralField<Scalar> f) {
  f.coeffs().row(0).setZero();
  return f;
}

}  // namespace oldb
