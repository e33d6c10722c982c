#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "oldb/operators.hpp"

namespace oldb {

// Smooth radial profiles of the dyadic partition. chi equals 1 on |ξ| ≤ 3/4,
// vanishes for |ξ| ≥ 4/3, and is nonincreasing in between; phi(ξ) = chi(ξ/2) − chi(ξ)
// is supported in 3/4 ≤ |ξ| ≤ 8/3.
struct DyadicProfile {
  static double smooth_step(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
  }

  static double chi(double r) { return smooth_step((r - 0.75) / (4.0 / 3.0 - 0.75)); }
  static double phi(double r) { return chi(0.5 * r) - chi(r); }
};

enum class FrequencyRange { All, Low, High };

// Dyadic filter bank on a grid: block range [j_min, j_max] covers every
// nonzero grid frequency; `split` is the low/high index j₀.
class DyadicPartition {
 public:
  static constexpr int kDefaultSplit = 2;

  explicit DyadicPartition(GridPtr grid, int split = kDefaultSplit) : grid_(std::move(grid)) {
    const double reach = grid_->points() * std::sqrt(static_cast<double>(grid_->dim())) / 2.0;
    j_min_ = -2;
    j_max_ = static_cast<int>(std::ceil(std::log2(reach))) + 1;
    if (split < j_min_ || split > j_max_)
      throw ConfigError("split index j0 = " + std::to_string(split) + " outside block range [" +
                        std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
    split_ = split;
    const auto& r = grid_->norm();
    weights_.reserve(j_max_ - j_min_ + 1);
    for (int j = j_min_; j <= j_max_; ++j) {
      const double scale = std::ldexp(1.0, -j);
      weights_.push_back(r.unaryExpr([scale](double x) { return DyadicProfile::phi(scale * x); }));
    }
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int split() const { return split_; }
  int block_count() const { return j_max_ - j_min_ + 1; }
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }

  bool in_range(int j, FrequencyRange range) const {
    switch (range) {
      case FrequencyRange::All: return contains(j);
      case FrequencyRange::Low: return contains(j) && j <= split_;
      case FrequencyRange::High: return contains(j) && j > split_;
    }
    return false;
  }

  // φ(2^{-j}|ξ|) over all modes.
  const Eigen::ArrayXd& block_weights(int j) const {
    if (!contains(j))
      throw ParameterError("block index " + std::to_string(j) + " outside [" +
                           std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
    return weights_[j - j_min_];
  }

  // χ(2^{-k}|ξ|) over all modes.
  Eigen::ArrayXd cutoff_weights(int k) const {
    const double scale = std::ldexp(1.0, -k);
    return grid_->norm().unaryExpr([scale](double x) { return DyadicProfile::chi(scale * x); });
  }

  Eigen::ArrayXd range_weights(FrequencyRange range) const {
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(grid_->size());
    for (int j = j_min_; j <= j_max_; ++j)
      if (in_range(j, range)) w += weights_[j - j_min_];
    return w;
  }

  // max over nonzero grid frequencies of |Σ_j φ(2^{-j}ξ) − 1|.
  double partition_of_unity_error() const {
    const Eigen::ArrayXd sum = range_weights(FrequencyRange::All);
    double err = 0.0;
    for (Index m = 0; m < grid_->size(); ++m)
      if (grid_->norm_sq()(m) > 0) err = std::max(err, std::abs(sum(m) - 1.0));
    return err;
  }

 private:
  GridPtr grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  int split_ = 0;
  std::vector<Eigen::ArrayXd> weights_;
};

template <typename Scalar>
SpectralField<Scalar> apply_multiplier(const SpectralField<Scalar>& f, const Eigen::ArrayXd& weights) {
  SpectralField<Scalar> out = f;
  for (int c = 0; c < f.components(); ++c)
    out.component(c).array() *= weights.cast<Scalar>().template cast<std::complex<Scalar>>();
  return out;
}

// Δ̇_j f.
template <typename Scalar>
SpectralField<Scalar> dyadic_block(const SpectralField<Scalar>& f, const DyadicPartition& P, int j) {
  require_same_grid(f.grid(), P.grid());
  return apply_multiplier(f, P.block_weights(j));
}

// Δ̇_j f, or zero outside the block range (on the grid those blocks are empty).
template <typename Scalar>
SpectralField<Scalar> dyadic_block_or_zero(const SpectralField<Scalar>& f, const DyadicPartition& P,
                                           int j) {
  if (!P.contains(j)) return f.zeros_like();
  return dyadic_block(f, P, j);
}

// Ṡ_k f = χ(2^{-k}D) f.
template <typename Scalar>
SpectralField<Scalar> low_cutoff(const SpectralField<Scalar>& f, const DyadicPartition& P, int k) {
  require_same_grid(f.grid(), P.grid());
  return apply_multiplier(f, P.cutoff_weights(k));
}

// (f^ℓ, f^h): blocks j ≤ j₀ and j > j₀.
template <typename Scalar>
std::pair<SpectralField<Scalar>, SpectralField<Scalar>> low_high_split(const SpectralField<Scalar>& f,
                                                                       const DyadicPartition& P) {
  require_same_grid(f.grid(), P.grid());
  return {apply_multiplier(f, P.range_weights(FrequencyRange::Low)),
          apply_multiplier(f, P.range_weights(FrequencyRange::High))};
}

inline bool is_infinite_exponent(double p) { return std::isinf(p); }

// Discrete L^p norm: ((2π)^n · mean |f|^p)^{1/p}, or max |f| for p = ∞.
template <typename Scalar>
Scalar lp_norm(const RealField<Scalar>& f, double p) {
  if (!(p >= 1.0)) throw ParameterError("L^p exponent must be >= 1");
  const auto mag = pointwise_magnitude(f);
  if (is_infinite_exponent(p)) return mag.maxCoeff();
  const Scalar volume = static_cast<Scalar>(f.grid().volume());
  if (p == 2.0) return std::sqrt(volume * mag.square().mean());
  return std::pow(volume * mag.pow(static_cast<Scalar>(p)).mean(), Scalar(1) / static_cast<Scalar>(p));
}

template <typename Scalar>
Scalar lp_norm(const SpectralField<Scalar>& f, double p) {
  if (p == 2.0) return l2_norm(f);
  return lp_norm(inverse_transform(f), p);
}

// ‖Δ̇_j f‖_{L^p} for every block of the partition, indexed j − j_min.
template <typename Scalar>
Eigen::ArrayXd block_norms(const SpectralField<Scalar>& f, const DyadicPartition& P, double p) {
  require_same_grid(f.grid(), P.grid());
  Eigen::ArrayXd out(P.block_count());
  for (int j = P.j_min(); j <= P.j_max(); ++j)
    out(j - P.j_min()) = static_cast<double>(lp_norm(dyadic_block(f, P, j), p));
  return out;
}

// Σ_j 2^{js} norms_j over the requested range, from precomputed block norms.
inline double besov_from_blocks(const Eigen::ArrayXd& norms, const DyadicPartition& P, double s,
                                FrequencyRange range = FrequencyRange::All) {
  double sum = 0.0;
  for (int j = P.j_min(); j <= P.j_max(); ++j)
    if (P.in_range(j, range)) sum += std::exp2(j * s) * norms(j - P.j_min());
  return sum;
}

// Norm identifier (s, p) with spatial summation exponent 1; q is the time
// exponent of the Chemin–Lerner variant.
struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double q = 1.0;
};

// Homogeneous Besov norm Σ_j 2^{js}‖Δ̇_j f‖_{L^p} over the truncated block
// range. The mean of f is invisible to every block.
template <typename Scalar>
double besov_norm(const SpectralField<Scalar>& f, const DyadicPartition& P, const BesovSpec& spec,
                  FrequencyRange range = FrequencyRange::All) {
  if (!(spec.p >= 1.0)) throw ParameterError("Besov integrability p must be >= 1");
  double sum = 0.0;
  for (int j = P.j_min(); j <= P.j_max(); ++j)
    if (P.in_range(j, range))
      sum += std::exp2(j * spec.s) * static_cast<double>(lp_norm(dyadic_block(f, P, j), spec.p));
  return sum;
}

// Chemin–Lerner norm Σ_j 2^{js} (∫_0^T ‖Δ̇_j u(t)‖^q dt)^{1/q} from per-block
// norm histories (rows: samples in time, columns: blocks). Trapezoid rule in
// time for finite q, running maximum for q = ∞.
inline double chemin_lerner_from_blocks(std::span<const double> times, const Eigen::ArrayXXd& history,
                                        const DyadicPartition& P, double s, double q,
                                        FrequencyRange range = FrequencyRange::All) {
  if (times.empty()) throw ParameterError("Chemin-Lerner norm of an empty series");
  if (static_cast<Index>(times.size()) != history.rows())
    throw DimensionError("time stamps and block history lengths differ");
  double sum = 0.0;
  for (int j = P.j_min(); j <= P.j_max(); ++j) {
    if (!P.in_range(j, range)) continue;
    const auto col = history.col(j - P.j_min());
    double value = 0.0;
    if (std::isinf(q)) {
      value = col.maxCoeff();
    } else {
      double integral = 0.0;
      for (std::size_t k = 1; k < times.size(); ++k)
        integral += 0.5 * (times[k] - times[k - 1]) *
                    (std::pow(col(k), q) + std::pow(col(k - 1), q));
      value = std::pow(integral, 1.0 / q);
    }
    sum += std::exp2(j * s) * value;
  }
  return sum;
}

template <typename Scalar>
double chemin_lerner_norm(std::span<const double> times, std::span<const SpectralField<Scalar>> series,
                          const DyadicPartition& P, const BesovSpec& spec, double T,
                          FrequencyRange range = FrequencyRange::All) {
  if (series.empty()) throw ParameterError("Chemin-Lerner norm of an empty series");
  if (times.size() != series.size()) throw DimensionError("times and fields differ in length");
  std::vector<double> used;
  std::vector<Eigen::ArrayXd> rows;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] > T) break;
    used.push_back(times[k]);
    rows.push_back(block_norms(series[k], P, spec.p));
  }
  Eigen::ArrayXXd history(rows.size(), P.block_count());
  for (std::size_t k = 0; k < rows.size(); ++k) history.row(k) = rows[k].transpose();
  return chemin_lerner_from_blocks(used, history, P, spec.s, spec.q, range);
}

// Bony decomposition uv = Ṫ_u v + Ṫ_v u + Ṙ(u, v) of scalar fields, with
// dealiased products. Ṫ_u v = Σ_j Ṡ_{j−1}u Δ̇_j v, Ṙ = Σ_j Δ̇_j u Δ̃_j v. The
// constant ū·v̄ is the only part of uv not carried by the three terms.
template <typename Scalar>
struct BonyParts {
  SpectralField<Scalar> paraproduct_uv;  // Ṫ_u v
  SpectralField<Scalar> paraproduct_vu;  // Ṫ_v u
  SpectralField<Scalar> remainder;       // Ṙ(u, v)

  SpectralField<Scalar> sum() const { return paraproduct_uv + paraproduct_vu + remainder; }
};

template <typename Scalar>
BonyParts<Scalar> bony_decompose(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                                 const DyadicPartition& P) {
  require_rank(u.rank(), Rank::Scalar, "bony_decompose");
  require_rank(v.rank(), Rank::Scalar, "bony_decompose");
  require_same_grid(u.grid(), v.grid());
  BonyParts<Scalar> parts{u.zeros_like(), u.zeros_like(), u.zeros_like()};
  for (int j = P.j_min(); j <= P.j_max(); ++j) {
    const SpectralField<Scalar> du = dyadic_block(u, P, j);
    const SpectralField<Scalar> dv = dyadic_block(v, P, j);
    parts.paraproduct_uv += multiply(low_cutoff(u, P, j - 1), dv);
    parts.paraproduct_vu += multiply(low_cutoff(v, P, j - 1), du);
    SpectralField<Scalar> near = dyadic_block_or_zero(v, P, j - 1) + dv + dyadic_block_or_zero(v, P, j + 1);
    parts.remainder += multiply(du, near);
  }
  return parts;
}

// Bernstein ratio ‖∂^α f‖_{L^q} / (λ^{|α| + n(1/p − 1/q)} ‖f‖_{L^p}).
template <typename Scalar>
double bernstein_ratio(const SpectralField<Scalar>& f, std::span<const int> alpha, double p, double q,
                       double lambda) {
  if (static_cast<int>(alpha.size()) != f.dim()) throw DimensionError("multi-index length != dimension");
  if (!(lambda > 0)) throw ParameterError("Bernstein scale must be positive");
  SpectralField<Scalar> d = f;
  int order = 0;
  for (int a = 0; a < f.dim(); ++a) {
    if (alpha[a] < 0) throw ParameterError("negative multi-index entry");
    for (int k = 0; k < alpha[a]; ++k) d = derivative(d, a);
    order += alpha[a];
  }
  const double base = static_cast<double>(lp_norm(f, p));
  if (base == 0.0) throw DegenerateInputError("Bernstein ratio of the zero field");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double exponent = order + f.dim() * (inv_p - inv_q);
  return static_cast<double>(lp_norm(d, q)) / (std::pow(lambda, exponent) * base);
}

// Supremum over first derivatives, sup_{|α|=1} ‖∂^α f‖_{L^p} / (λ‖f‖_{L^p}).
template <typename Scalar>
double gradient_bernstein_ratio(const SpectralField<Scalar>& f, double p, double lambda) {
  double best = 0.0;
  for (int a = 0; a < f.dim(); ++a) {
    std::array<int, 3> alpha{0, 0, 0};
    alpha[a] = 1;
    best = std::max(best, bernstein_ratio(f, std::span<const int>(alpha.data(), f.dim()), p, p, lambda));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Empirical ratios for the product and commutator estimates. Each returns
// LHS / RHS with constant 1; zero when the left side vanishes.

enum class InequalityKind {
  ProductLaw,          // ‖uv‖_{Ḃ^{n/2−1}_{2,1}} vs Ḃ^{n/p−1}_{p,1} × Ḃ^{n/p}_{p,1} pairs
  ProductLawGeneral,   // ‖uv‖_{Ḃ^{s1+s2−n/q}_{p,1}} vs ‖u‖_{Ḃ^{s1}_{q,1}}‖v‖_{Ḃ^{s2}_{p,1}}
  CommutatorBlock,     // Σ_j 2^{js}‖[u·∇, Δ̇_j]v‖_{L^p} vs ‖∇u‖_{Ḃ^{n/p}_{p,1}}‖v‖_{Ḃ^s_{p,1}}
  CommutatorLowFrequency,  // low-block commutator against the hybrid norm of v
};

// Zero-order multiplier inserted in the low-frequency commutator.
enum class ZeroOrderMultiplier { None, ProjectorInside, ProjectorOutside };

namespace detail {

inline double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  return lhs / rhs;
}

template <typename Scalar>
void require_divergence_free(const SpectralField<Scalar>& u, const char* what) {
  require_rank(u.rank(), Rank::Vector, what);
  if (divergence_residual(u) > 1e-10)
    throw PreconditionError(std::string(what) + " requires a divergence-free velocity");
}

inline void require_product_exponent(double p) {
  if (!(p >= 2.0 && p < 4.0)) throw ParameterError("exponent p must satisfy 2 <= p < 4");
}

}  // namespace detail

template <typename Scalar>
double product_law_ratio(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                         const DyadicPartition& P, double p) {
  detail::require_product_exponent(p);
  const double n = u.dim();
  const double lhs = besov_norm(multiply(u, v), P, {n / 2 - 1, 2.0});
  const double rhs = besov_norm(u, P, {n / p - 1, p}) * besov_norm(v, P, {n / p, p}) +
                     besov_norm(u, P, {n / p, p}) * besov_norm(v, P, {n / p - 1, p});
  return detail::safe_ratio(lhs, rhs);
}

template <typename Scalar>
double general_product_ratio(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                             const DyadicPartition& P, double s1, double s2, double q, double p) {
  const double n = u.dim();
  if (!(p >= 1 && q >= 1)) throw ParameterError("integrability exponents must be >= 1");
  const double ip = 1.0 / p, iq = 1.0 / q;
  if (!(s1 <= n * iq) || !(s2 <= n * std::min(ip, iq)) ||
      !(s1 + s2 > n * std::max(0.0, ip + iq - 1.0)))
    throw ParameterError("regularity indices outside the admissible product range");
  const double lhs = besov_norm(multiply(u, v), P, {s1 + s2 - n * iq, p});
  const double rhs = besov_norm(u, P, {s1, q}) * besov_norm(v, P, {s2, p});
  return detail::safe_ratio(lhs, rhs);
}

template <typename Scalar>
double commutator_block_ratio(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                              const DyadicPartition& P, double s, double p) {
  detail::require_divergence_free(u, "commutator_block_ratio");
  const double n = u.dim();
  if (!(p >= 1.0)) throw ParameterError("exponent p must be >= 1");
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  if (!(s > -1.0 - n * std::min(ip, 1.0 - ip) && s <= 1.0 + n * ip))
    throw ParameterError("regularity s outside the admissible commutator range");
  const SpectralField<Scalar> transported = advect(u, v);
  double lhs = 0.0;
  for (int j = P.j_min(); j <= P.j_max(); ++j) {
    const SpectralField<Scalar> comm = advect(u, dyadic_block(v, P, j)) - dyadic_block(transported, P, j);
    lhs += std::exp2(j * s) * static_cast<double>(lp_norm(comm, p));
  }
  const double rhs = besov_norm(gradient(u), P, {n * ip, p}) * besov_norm(v, P, {s, p});
  return detail::safe_ratio(lhs, rhs);
}

template <typename Scalar>
double commutator_lowfreq_ratio(const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                                const DyadicPartition& P, double p,
                                ZeroOrderMultiplier multiplier = ZeroOrderMultiplier::None) {
  detail::require_divergence_free(u, "commutator_lowfreq_ratio");
  detail::require_product_exponent(p);
  if (multiplier != ZeroOrderMultiplier::None) require_rank(v.rank(), Rank::Vector, "projected commutator");
  const double n = u.dim();
  const SpectralField<Scalar> inner = multiplier == ZeroOrderMultiplier::ProjectorOutside ? leray_project(v) : v;
  const SpectralField<Scalar> transported = advect(u, inner);
  double lhs = 0.0;
  for (int j = P.j_min(); j <= std::min(P.split(), P.j_max()); ++j) {
    SpectralField<Scalar> block_of_transport = dyadic_block(transported, P, j);
    SpectralField<Scalar> block = dyadic_block(inner, P, j);
    if (multiplier == ZeroOrderMultiplier::ProjectorInside) {
      block_of_transport = leray_project(block_of_transport);
      block = leray_project(block);
    }
    const SpectralField<Scalar> comm = block_of_transport - advect(u, block);
    lhs += std::exp2(j * (n / 2 - 1)) * static_cast<double>(l2_norm(comm));
  }
  const double rhs = besov_norm(gradient(u), P, {n / p, p}) *
                     (besov_norm(v, P, {n / 2 - 1, 2.0}, FrequencyRange::Low) +
                      besov_norm(v, P, {n / p - 1, p}, FrequencyRange::High));
  return detail::safe_ratio(lhs, rhs);
}

struct InequalityInputs {
  double p = 3.0;
  double q = 2.0;      // second integrability index (general product law)
  double s = 0.0;      // regularity of v (block commutator)
  double s1 = 0.0;     // general product law
  double s2 = 0.0;
  ZeroOrderMultiplier multiplier = ZeroOrderMultiplier::None;
};

template <typename Scalar>
double inequality_ratio(InequalityKind kind, const SpectralField<Scalar>& u, const SpectralField<Scalar>& v,
                        const DyadicPartition& P, const InequalityInputs& in = {}) {
  switch (kind) {
    case InequalityKind::ProductLaw: return product_law_ratio(u, v, P, in.p);
    case InequalityKind::ProductLawGeneral: return general_product_ratio(u, v, P, in.s1, in.s2, in.q, in.p);
    case InequalityKind::CommutatorBlock: return commutator_block_ratio(u, v, P, in.s, in.p);
    case InequalityKind::CommutatorLowFrequency: return commutator_lowfreq_ratio(u, v, P, in.p, in.multiplier);
  }
  throw ParameterError("unknown inequality kind");
}

}  // namespace oldb
