#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oldb/littlewood_paley.hpp"
#include "oldb/random_fields.hpp"

using namespace oldb;

namespace {

Field single_mode(GridPtr g, std::array<int, 3> k, double amp = 1.0) {
  Field f(g, Rank::Scalar);
  f.coeffs()(g->mode_index(k), 0) += amp;
  f.coeffs()(g->mode_index({-k[0], -k[1], -k[2]}), 0) += amp;
  return f;
}

double max_abs(const Field& f) { return f.coeffs().cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("profile support and monotonicity") {
  CHECK(DyadicProfile::chi(0.0) == 1.0);
  CHECK(DyadicProfile::chi(0.75) == 1.0);
  CHECK(DyadicProfile::chi(4.0 / 3.0) == 0.0);
  double prev = 1.0;
  for (double r = 0; r < 2; r += 1e-3) {
    const double c = DyadicProfile::chi(r);
    CHECK(c <= prev);
    prev = c;
  }
  for (double r : {0.0, 0.5, 0.74, 2.7, 3.0, 10.0}) CHECK(std::abs(DyadicProfile::phi(r)) <= 1e-12);
  CHECK(DyadicProfile::phi(1.5) > 0.0);
  CHECK(DyadicProfile::phi(1.5) <= 1.0);
  // |ξ| = 1.5 is shared by blocks 0 and 1 only
  CHECK(DyadicProfile::phi(1.5) + DyadicProfile::phi(0.75) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("partition construction") {
  auto g = make_grid(2, 64);
  DyadicPartition P(g);
  CHECK(P.j_min() == -2);
  CHECK(P.j_max() == static_cast<int>(std::ceil(std::log2(64 * std::sqrt(2.0) / 2))) + 1);
  CHECK(P.split() == 2);
  CHECK(P.partition_of_unity_error() <= 1e-10);
  double at_one = 0, at_zero = 0;
  for (int j = P.j_min(); j <= P.j_max(); ++j) {
    at_one += DyadicProfile::phi(std::ldexp(1.0, -j));
    at_zero += DyadicProfile::phi(0.0);
  }
  CHECK(at_one == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(at_zero == 0.0);
  CHECK_THROWS_AS(DyadicPartition(g, 40), ConfigError);
  CHECK_THROWS_AS(DyadicPartition(g, -3), ConfigError);
  CHECK_THROWS_AS(P.block_weights(P.j_max() + 1), ParameterError);
  CHECK(DyadicPartition(make_grid(3, 16)).partition_of_unity_error() <= 1e-10);
}

TEST_CASE("blocks, cutoffs and reconstruction") {
  auto g = make_grid(2, 64);
  DyadicPartition P(g);
  Field m1 = single_mode(g, {1, 0, 0});
  for (int j = P.j_min(); j <= P.j_max(); ++j)
    if (std::ldexp(8.0 / 3.0, j) < 1 || std::ldexp(0.75, j) > 1) CHECK(max_abs(dyadic_block(m1, P, j)) == 0.0);

  std::mt19937_64 rng(4);
  Field f = remove_mean(random_band_field(g, Rank::Scalar, 0, 31, rng));
  Field sum = f.zeros_like();
  for (int j = P.j_min(); j <= P.j_max(); ++j) sum += dyadic_block(f, P, j);
  CHECK(l2_norm(sum - f) <= 1e-9 * l2_norm(f));

  for (int j = P.j_min(); j <= P.j_max(); ++j)
    for (int k = P.j_min(); k <= P.j_max(); ++k)
      if (std::abs(j - k) >= 2) CHECK(max_abs(dyadic_block(dyadic_block(f, P, j), P, k)) <= 1e-12);

  // Ṡ_k = Σ_{j ≤ k−1} Δ̇_j plus the mean
  for (int k = P.j_min() + 1; k <= P.j_max(); ++k) {
    Field partial = f.zeros_like();
    for (int j = P.j_min(); j <= k - 1; ++j) partial += dyadic_block(f, P, j);
    CHECK(l2_norm(low_cutoff(f, P, k) - partial) <= 1e-12 * l2_norm(f));
  }
}

TEST_CASE("low/high split") {
  auto g = make_grid(2, 64);
  DyadicPartition P(g);
  std::mt19937_64 rng(6);
  Field low = random_band_field(g, Rank::Scalar, 1, std::ldexp(0.75, P.split()), rng);
  CHECK(max_abs(low_high_split(low, P).second) <= 1e-12);
  Field high = single_mode(g, {1 << (P.split() + 3), 0, 0});
  CHECK(max_abs(low_high_split(high, P).first) <= 1e-12);

  Field f = remove_mean(random_band_field(g, Rank::Vector, 0, 31, rng));
  auto [fl, fh] = low_high_split(f, P);
  const double sup = inverse_transform(f).samples().cwiseAbs().maxCoeff();
  CHECK(inverse_transform(Field(fl + fh - f)).samples().cwiseAbs().maxCoeff() <= 1e-9 * sup);

  const BesovSpec spec{0.5, 3.0};
  const double all = besov_norm(f, P, spec);
  const double parts = besov_norm(f, P, spec, FrequencyRange::Low) + besov_norm(f, P, spec, FrequencyRange::High);
  CHECK(all == doctest::Approx(parts).epsilon(1e-14));
}

TEST_CASE("Lebesgue and Besov norms") {
  auto g = make_grid(2, 32);
  DyadicPartition P(g);
  // |ξ| ∈ [4/3, 3/2]·2^j is seen by block j alone: |ξ₀| = 6 sits in block 2
  const Index m6 = g->mode_index({6, 0, 0});
  for (int j = P.j_min(); j <= P.j_max(); ++j) CHECK(P.block_weights(j)(m6) == (j == 2 ? 1.0 : 0.0));
  // |ξ₀| = 2^k is shared by blocks k − 1 and k
  const Index m4 = g->mode_index({4, 0, 0});
  CHECK(P.block_weights(1)(m4) + P.block_weights(2)(m4) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(P.block_weights(1)(m4) > 0.0);

  // real cosine: ‖cos‖_{L²} = π√2 on the 2-torus, and ‖cos‖_∞ = 1
  Field c = single_mode(g, {4, 0, 0}, 0.5);
  CHECK(lp_norm(c, 2.0) == doctest::Approx(std::sqrt(2.0) * std::numbers::pi).epsilon(1e-13));
  CHECK(lp_norm(inverse_transform(c), 2.0) == doctest::Approx(lp_norm(c, 2.0)).epsilon(1e-13));
  CHECK(lp_norm(c, INFINITY) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(lp_norm(c, 0.5), ParameterError);

  // single-block field: Besov norm is 2^{2s}‖cos‖_{L^p}
  c = single_mode(g, {6, 0, 0}, 0.5);
  for (double p : {2.0, 3.0, double(INFINITY)}) {
    const double Bn = besov_norm(c, P, {0.4, p});
    CHECK(Bn == doctest::Approx(std::exp2(0.8) * lp_norm(c, p)).epsilon(1e-12));
    CHECK(besov_norm(Field(c * -3.0), P, {0.4, p}) == doctest::Approx(3 * Bn).epsilon(1e-14));
    // nesting: ratio of norms at s₁, s₂ is 2^{2(s₁−s₂)}
    CHECK(besov_norm(c, P, {-0.5, p}) / besov_norm(c, P, {1.0, p}) == doctest::Approx(std::exp2(2 * -1.5)).epsilon(1e-12));
  }
}

TEST_CASE("Chemin-Lerner norms") {
  auto g = make_grid(2, 32);
  DyadicPartition P(g);
  std::mt19937_64 rng(12);
  Field f = random_band_field(g, Rank::Scalar, 1, 10, rng);
  const BesovSpec one{0.3, 2.0, 1.0};
  std::vector<double> times;
  std::vector<Field> constant, decaying;
  for (int i = 0; i <= 20; ++i) {
    times.push_back(0.1 * i);
    constant.push_back(f);
    decaying.push_back(f * std::exp(-0.5 * i));
  }
  const double T = 2.0;
  CHECK(chemin_lerner_norm<double>(times, constant, P, one, T) ==
        doctest::Approx(T * besov_norm(f, P, one)).epsilon(1e-12));
  BesovSpec sup = one;
  sup.q = INFINITY;
  CHECK(chemin_lerner_norm<double>(times, decaying, P, sup, T) == doctest::Approx(besov_norm(f, P, sup)).epsilon(1e-12));
  CHECK_THROWS_AS(chemin_lerner_norm<double>({}, std::span<const Field>{}, P, one, T), ParameterError);

  // random series: L̃¹ equals the trapezoid L¹(Ḃ), and L̃^∞ ≥ sup_t ‖·‖_Ḃ
  std::vector<Field> series;
  for (std::size_t i = 0; i < times.size(); ++i) series.push_back(random_band_field(g, Rank::Scalar, 1, 10, rng));
  double l1 = 0, linf = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double b = besov_norm(series[i], P, one);
    linf = std::max(linf, b);
    if (i > 0) l1 += 0.05 * (b + besov_norm(series[i - 1], P, one));
  }
  CHECK(chemin_lerner_norm<double>(times, series, P, one, T) == doctest::Approx(l1).epsilon(1e-12));
  CHECK(chemin_lerner_norm<double>(times, series, P, sup, T) >= linf);
}

TEST_CASE("Bony decomposition") {
  auto g = make_grid(2, 64);
  DyadicPartition P(g);
  std::mt19937_64 rng(14);
  Field u = remove_mean(random_band_field(g, Rank::Scalar, 0, 10, rng));
  Field v = remove_mean(random_band_field(g, Rank::Scalar, 0, 10, rng));
  auto parts = bony_decompose(u, v, P);
  Field uv = remove_mean(multiply(u, v));
  CHECK(l2_norm(remove_mean(parts.sum()) - uv) <= 1e-8 * l2_norm(uv));

  // low u, one-block v: the paraproduct of u on v carries the product
  Field lo = single_mode(g, {1, 0, 0});
  Field hi = single_mode(g, {0, 16, 0});
  auto lp = bony_decompose(lo, hi, P);
  CHECK(max_abs(lp.paraproduct_vu) <= 1e-12);
  CHECK(max_abs(lp.remainder) <= 1e-12);
  CHECK(l2_norm(lp.paraproduct_uv - multiply(lo, hi)) <= 1e-12 * l2_norm(multiply(lo, hi)));

  // constant u: Ṫ_u v + Ṙ vanish except through the mean, which no block sees
  Field one(g, Rank::Scalar);
  one.coeffs()(0, 0) = 2.0;
  auto cp = bony_decompose(one, v, P);
  CHECK(max_abs(cp.paraproduct_vu) <= 1e-12);
  CHECK(l2_norm(cp.sum() - multiply(one, v)) <= 1e-12 * l2_norm(v));
  CHECK_THROWS_AS(bony_decompose(u, random_band_field(g, Rank::Vector, 0, 3, rng), P), DimensionError);
}

TEST_CASE("Bernstein ratios") {
  auto g = make_grid(2, 64);
  Field m = single_mode(g, {3, 4, 0});
  const std::array<int, 2> e1{1, 0};
  CHECK(bernstein_ratio(m, e1, 2.0, 2.0, 5.0) == doctest::Approx(3.0 / 5.0).epsilon(1e-13));
  CHECK_THROWS_AS(bernstein_ratio(m.zeros_like(), e1, 2.0, 2.0, 5.0), DegenerateInputError);

  std::mt19937_64 rng(3);
  for (double lambda : {4.0, 8.0}) {
    double lo = INFINITY, hi = 0;
    for (int i = 0; i < 20; ++i) {
      Field f = random_band_field(g, Rank::Scalar, 0.75 * lambda, 8.0 / 3.0 * lambda, rng);
      const double r = gradient_bernstein_ratio(f, 3.0, lambda);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(lo > 0.2);
    CHECK(hi < 8.0 / 3.0 * 2);
  }
}

TEST_CASE("lemma ratios: admissibility and homogeneity") {
  auto g = make_grid(2, 32);
  DyadicPartition P(g);
  std::mt19937_64 rng(31);
  Field u = random_solenoidal_field(g, 1, 5, rng);
  Field s = random_band_field(g, Rank::Scalar, 1, 8, rng);
  Field t = random_band_field(g, Rank::Scalar, 1, 8, rng);

  CHECK(product_law_ratio(s, s.zeros_like(), P, 3.0) == 0.0);
  CHECK(commutator_block_ratio(u, s.zeros_like(), P, 0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(product_law_ratio(s, t, P, 4.0), ParameterError);
  CHECK_THROWS_AS(general_product_ratio(s, t, P, 2.0, 0.5, 2.0, 2.0), ParameterError);
  CHECK_THROWS_AS(commutator_block_ratio(u, s, P, 5.0, 2.0), ParameterError);

  Field compressible = random_band_field(g, Rank::Vector, 1, 5, rng);
  CHECK_THROWS_AS(commutator_block_ratio(compressible, s, P, 0.0, 2.0), PreconditionError);
  CHECK_THROWS_AS(commutator_lowfreq_ratio(compressible, u, P, 3.0), PreconditionError);

  const double r1 = commutator_block_ratio(u, s, P, 0.0, 3.0);
  const double r2 = commutator_block_ratio(u, Field(s * 7.0), P, 0.0, 3.0);
  CHECK(std::isfinite(r1));
  CHECK(r1 > 0);
  CHECK(r2 == doctest::Approx(r1).epsilon(1e-10));

  for (auto mult : {ZeroOrderMultiplier::None, ZeroOrderMultiplier::ProjectorInside,
                    ZeroOrderMultiplier::ProjectorOutside}) {
    Field v = random_band_field(g, Rank::Vector, 1, 8, rng);
    const double r = commutator_lowfreq_ratio(u, v, P, 3.0, mult);
    CHECK(std::isfinite(r));
    CHECK(r >= 0);
  }
  InequalityInputs in;
  in.s1 = 0.5;
  in.s2 = 0.5;
  in.q = 2.0;
  in.p = 2.0;
  CHECK(std::isfinite(inequality_ratio(InequalityKind::ProductLawGeneral, s, t, P, in)));
  CHECK(inequality_ratio(InequalityKind::ProductLaw, s, t, P) ==
        doctest::Approx(product_law_ratio(s, t, P, 3.0)));
}
