#pragma once

#include <Eigen/Core>

#include <string>

#include "oldb/operators.hpp"

namespace oldb {

// Coefficients of the stress/velocity coupling. b is the slip parameter of
// the bilinear form; μ the viscosity; K₁ multiplies div τ in the momentum
// equation and K₂ multiplies D(u) in the stress equation.
struct ConstitutiveParams {
  double b = 0.0;
  double mu = 1.0;
  double K1 = 1.0;
  double K2 = 1.0;

  void validate() const {
    if (!(b >= -1.0 && b <= 1.0))
      throw ParameterError("slip parameter b must lie in [-1, 1], got " + std::to_string(b));
    if (!(mu >= 0.0) || !(K1 >= 0.0) || !(K2 >= 0.0))
      throw ParameterError("mu, K1, K2 must be nonnegative");
  }
};

// Pointwise F(τ, ∇u) = τΩ − Ωτ + b(Dτ + τD), with (∇u)_ij = ∂_j u_i.
template <typename DerivedTau, typename DerivedGrad>
auto constitutive_form(const Eigen::MatrixBase<DerivedTau>& tau,
                       const Eigen::MatrixBase<DerivedGrad>& grad_u,
                       typename DerivedTau::Scalar b) {
  const auto D = ((grad_u + grad_u.transpose()) / 2).eval();
  const auto W = ((grad_u - grad_u.transpose()) / 2).eval();
  return (tau * W - W * tau + b * (D * tau + tau * D)).eval();
}

namespace detail {

template <int Dim, typename Scalar>
RealField<Scalar> bilinear_form_samples(const RealField<Scalar>& tau,
                                        const RealField<Scalar>& grad, Scalar b, Rank out_rank) {
  using Mat = Eigen::Matrix<Scalar, Dim, Dim>;
  RealField<Scalar> out(tau.grid_ptr(), out_rank);
  const bool packed_in = tau.rank() == Rank::SymTensor;
  Mat t, G;
  for (Index p = 0; p < tau.grid().size(); ++p) {
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) {
        t(i, j) = tau.samples()(p, packed_in ? sym_index(i, j, Dim) : tensor_index(i, j, Dim));
        G(i, j) = grad.samples()(p, tensor_index(i, j, Dim));
      }
    const Mat F = constitutive_form(t, G, b);
    if (out_rank == Rank::SymTensor) {
      for (int i = 0; i < Dim; ++i)
        for (int j = i; j < Dim; ++j) out.samples()(p, sym_index(i, j, Dim)) = F(i, j);
    } else {
      for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) out.samples()(p, tensor_index(i, j, Dim)) = F(i, j);
    }
  }
  return out;
}

template <typename Scalar>
SpectralField<Scalar> bilinear_form_impl(const SpectralField<Scalar>& tau,
                                         const SpectralField<Scalar>& u, Scalar b, Rank out_rank) {
  if (!(b >= Scalar(-1) && b <= Scalar(1)))
    throw ParameterError("slip parameter b must lie in [-1, 1]");
  require_rank(u.rank(), Rank::Vector, "bilinear_F velocity");
  if (tau.rank() != Rank::SymTensor && tau.rank() != Rank::Tensor)
    throw DimensionError("bilinear_F: stress must be a tensor field");
  require_same_grid(tau.grid(), u.grid());
  const RealField<Scalar> tau_phys = inverse_transform(tau);
  const RealField<Scalar> grad_phys = inverse_transform(gradient(u));
  RealField<Scalar> F = tau.dim() == 2
                            ? bilinear_form_samples<2>(tau_phys, grad_phys, b, out_rank)
                            : bilinear_form_samples<3>(tau_phys, grad_phys, b, out_rank);
  return dealias(transform(F));
}

}  // namespace detail

// F(τ, ∇u) evaluated pointwise on the grid and re-transformed with
// dealiasing. The result is stored packed, hence exactly symmetric.
template <typename Scalar>
SpectralField<Scalar> bilinear_F(const SpectralField<Scalar>& tau, const SpectralField<Scalar>& u,
                                 Scalar b) {
  require_rank(tau.rank(), Rank::SymTensor, "bilinear_F stress");
  return detail::bilinear_form_impl(tau, u, b, Rank::SymTensor);
}

// Same product kept in full n×n storage, for checking symmetry numerically.
template <typename Scalar>
SpectralField<Scalar> bilinear_F_full(const SpectralField<Scalar>& tau,
                                      const SpectralField<Scalar>& u, Scalar b) {
  return detail::bilinear_form_impl(tau, u, b, Rank::Tensor);
}

}  // namespace oldb
