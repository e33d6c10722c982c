#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "oldb/constitutive.hpp"

namespace oldb {

// Per-mode symbol of the linearized system in the amplitudes (Γ̂, û):
//   dΓ̂/dt = −a r û,   dû/dt = c r Γ̂ − μ r² û.
// With D(u) the symmetric gradient, div D(u) = Δu/2 on divergence-free u, so
// the physical coefficients are a = K₂/2, c = K₁. The reference symbol
// [[0, −r], [r, −r²]] is a = c = μ = 1.
struct SymbolCoefficients {
  double gamma_coupling = 1.0;     // a
  double velocity_coupling = 1.0;  // c
  double viscosity = 1.0;          // μ

  static SymbolCoefficients reference() { return {}; }
  static SymbolCoefficients from_params(const ConstitutiveParams& p) { return {p.K2 / 2.0, p.K1, p.mu}; }

  // Radius where the discriminant μ²r⁴ − 4ac r² vanishes.
  double critical_radius() const {
    if (viscosity == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::sqrt(gamma_coupling * velocity_coupling) / viscosity;
  }
};

enum class Regime { Oscillatory, Degenerate, Overdamped };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Oscillatory: return "oscillatory";
    case Regime::Degenerate: return "degenerate";
    case Regime::Overdamped: return "overdamped";
  }
  return "unknown";
}

template <typename Scalar = double>
using ModeMatrix = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar = double>
struct LinearMode {
  using Complex = std::complex<Scalar>;
  Scalar r = 0;
  ModeMatrix<Scalar> A;
  Complex lambda_plus;   // larger modulus branch (parabolic for large r)
  Complex lambda_minus;  // smaller modulus branch (damped for large r)
  Regime regime = Regime::Oscillatory;
};

namespace detail {

template <typename Scalar>
void require_positive_radius(Scalar r) {
  if (!(r > Scalar(0))) throw DomainError("mode radius must be positive");
}

// e^z − 1 without cancellation for small |z|.
template <typename Scalar>
std::complex<Scalar> expm1(std::complex<Scalar> z) {
  const Scalar x = z.real(), y = z.imag();
  const Scalar s = std::sin(y / 2);
  return {std::expm1(x) * std::cos(y) - 2 * s * s, std::exp(x) * std::sin(y)};
}

}  // namespace detail

template <typename Scalar = double>
ModeMatrix<Scalar> mode_matrix(Scalar r, const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  detail::require_positive_radius(r);
  ModeMatrix<Scalar> A;
  A << Scalar(0), -static_cast<Scalar>(k.gamma_coupling) * r,
      static_cast<Scalar>(k.velocity_coupling) * r, -static_cast<Scalar>(k.viscosity) * r * r;
  return A;
}

// Roots of λ² + μr²λ + ac r² = 0. Overdamped roots use the product form for
// the small root; the degenerate tag applies when the discriminant vanishes
// to rounding.
template <typename Scalar = double>
LinearMode<Scalar> eigenvalues(Scalar r, const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  using Complex = std::complex<Scalar>;
  LinearMode<Scalar> mode;
  mode.r = r;
  mode.A = mode_matrix(r, k);
  const Scalar half_trace = static_cast<Scalar>(k.viscosity) * r * r / 2;  // −tr A / 2
  const Scalar det = static_cast<Scalar>(k.gamma_coupling * k.velocity_coupling) * r * r;
  const Scalar disc = half_trace * half_trace - det;  // quarter discriminant
  const Scalar scale = std::max(half_trace * half_trace, std::abs(det));
  if (std::abs(disc) <= Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale) {
    mode.regime = Regime::Degenerate;
    mode.lambda_plus = mode.lambda_minus = Complex(-half_trace, 0);
  } else if (disc > 0) {
    mode.regime = Regime::Overdamped;
    const Scalar big = -(half_trace + std::sqrt(disc));
    mode.lambda_plus = Complex(big, 0);
    mode.lambda_minus = Complex(det / big, 0);
  } else {
    mode.regime = Regime::Oscillatory;
    const Scalar w = std::sqrt(-disc);
    mode.lambda_plus = Complex(-half_trace, -w);
    mode.lambda_minus = Complex(-half_trace, w);
  }
  return mode;
}

// exp(tA(r)). Distinct roots: Newton divided-difference form
//   e^{λ₋t}[I + (e^{(λ₊−λ₋)t} − 1)/(λ₊ − λ₋) (A − λ₋I)],
// which stays accurate as the roots merge; the degenerate radius uses the
// Jordan form e^{λt}(I + t(A − λI)).
template <typename Scalar = double>
ModeMatrix<Scalar> propagator(Scalar r, Scalar t, const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  using Complex = std::complex<Scalar>;
  if (!(t >= Scalar(0))) throw DomainError("propagator time must be nonnegative");
  const LinearMode<Scalar> mode = eigenvalues(r, k);
  const ModeMatrix<Scalar> I = ModeMatrix<Scalar>::Identity();
  if (mode.regime == Regime::Degenerate) {
    const Scalar lambda = mode.lambda_plus.real();
    return std::exp(lambda * t) * (I + t * (mode.A - lambda * I));
  }
  const Complex delta = mode.lambda_plus - mode.lambda_minus;
  const Complex factor = detail::expm1(delta * t) / delta;
  const Complex base = std::exp(mode.lambda_minus * t);
  const Eigen::Matrix<Complex, 2, 2> shifted =
      mode.A.template cast<Complex>() - mode.lambda_minus * Eigen::Matrix<Complex, 2, 2>::Identity();
  const Eigen::Matrix<Complex, 2, 2> E =
      base * (Eigen::Matrix<Complex, 2, 2>::Identity() + factor * shifted);
  return E.real();
}

// 2-norm condition number of the eigenvector matrix (infinite at the
// degenerate radius).
template <typename Scalar = double>
Scalar eigenbasis_condition(Scalar r, const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  using Complex = std::complex<Scalar>;
  const LinearMode<Scalar> mode = eigenvalues(r, k);
  if (mode.regime == Regime::Degenerate) return std::numeric_limits<Scalar>::infinity();
  Eigen::Matrix<Complex, 2, 2> V;
  const Complex a01 = mode.A(0, 1);
  V << a01, a01, mode.lambda_plus, mode.lambda_minus;  // (A − λI)v = 0 with v = (A₀₁, λ)
  V.col(0).normalize();
  V.col(1).normalize();
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 2, 2>> svd(V);
  const auto s = svd.singularValues();
  return s(0) / s(1);
}

template <typename Scalar = double>
struct AsymptoticRow {
  Scalar r;
  Scalar parabolic_ratio;  // λ₊ / (−μ r²)
  Scalar lambda_minus;
  Scalar damped_limit;     // −ac/μ, the large-r limit of λ₋
};

// Large-radius branches. Only defined in the overdamped regime.
template <typename Scalar = double>
std::vector<AsymptoticRow<Scalar>> asymptotic_check(const std::vector<Scalar>& radii,
                                                    const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  std::vector<AsymptoticRow<Scalar>> rows;
  const double rc = k.critical_radius();
  for (Scalar r : radii)
    if (!(r > rc)) throw DomainError("asymptotic table needs radii above the critical radius " + std::to_string(rc));
  for (Scalar r : radii) {
    const LinearMode<Scalar> m = eigenvalues(r, k);
    rows.push_back({r, m.lambda_plus.real() / (-static_cast<Scalar>(k.viscosity) * r * r), m.lambda_minus.real(),
                    -static_cast<Scalar>(k.gamma_coupling * k.velocity_coupling / k.viscosity)});
  }
  return rows;
}

template <typename Scalar = double>
struct CoercivityForm {
  ModeMatrix<Scalar> form;  // Q in the (Γ, u) amplitudes
  Scalar min_ratio;         // smallest eigenvalue of Q against |a|² + |v|²
};

// Q(a, v) = |a|² + (1 − η)|v|² + η|ra − v|², with ra − v the amplitude of
// w = ΛΓ − u. Expanded: (1 + ηr²)|a|² − 2ηr Re(a v̄) + |v|².
template <typename Scalar = double>
CoercivityForm<Scalar> coercivity_weight(Scalar r, Scalar eta) {
  detail::require_positive_radius(r);
  if (!(eta > Scalar(0) && eta < Scalar(1))) throw ParameterError("eta must lie in (0, 1)");
  CoercivityForm<Scalar> out;
  out.form << 1 + eta * r * r, -eta * r, -eta * r, Scalar(1);
  Eigen::SelfAdjointEigenSolver<ModeMatrix<Scalar>> es(out.form, Eigen::EigenvaluesOnly);
  out.min_ratio = es.eigenvalues()(0);
  return out;
}

// η = min(1/2, 2^{−2j₀−4}).
inline double default_eta(int split) { return std::min(0.5, std::exp2(-2.0 * split - 4.0)); }

// ∫₀ᵗ exp((t − s)A) G(s) ds by composite Simpson with `intervals` (even)
// subintervals; the forcing is an opaque (Γ, u) amplitude pair.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 2, 1> duhamel_integral(
    Scalar r, Scalar t, const std::function<Eigen::Matrix<std::complex<Scalar>, 2, 1>(Scalar)>& forcing,
    int intervals = 200, const SymbolCoefficients& k = SymbolCoefficients::reference()) {
  using Vec = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
  if (!(t >= Scalar(0))) throw DomainError("Duhamel time must be nonnegative");
  if (intervals < 2 || intervals % 2 != 0) throw ParameterError("Simpson rule needs an even interval count");
  const Scalar h = t / intervals;
  Vec sum = Vec::Zero();
  for (int i = 0; i <= intervals; ++i) {
    const Scalar s = i * h;
    const Scalar w = (i == 0 || i == intervals) ? Scalar(1) : (i % 2 ? Scalar(4) : Scalar(2));
    sum += w * (propagator(r, t - s, k).template cast<std::complex<Scalar>>() * forcing(s));
  }
  return sum * (h / 3);
}

}  // namespace oldb
