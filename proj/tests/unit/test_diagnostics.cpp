#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oldb/diagnostics.hpp"
#include "oldb/random_fields.hpp"

using namespace oldb;

namespace {

State random_state(GridPtr grid, std::uint64_t seed, double kmax = 6) {
  std::mt19937_64 rng(seed);
  Field u = random_solenoidal_field(grid, 1, kmax, rng);
  Field tau = random_band_field(grid, Rank::SymTensor, 1, kmax, rng);
  return State(0.0, dealias(u), dealias(tau));
}

SimConfig small_run() {
  SimConfig c;
  c.points = 32;
  c.dt = 1e-3;
  c.t_end = 0.05;
  c.output_interval = 1e-3;
  c.keep_states = true;
  return c;
}

}  // namespace

TEST_CASE("norm series") {
  NormSeries s({0.0, 0.5, 1.0});
  s.add_channel("B_2_1_s0.0_low", {1.0, 0.5, 0.25});
  s.add_comment("seed", "7");
  CHECK_NOTHROW(s.validate());
  std::ostringstream out;
  s.write_csv(out);
  CHECK(out.str() == "# seed=7\ntime,B_2_1_s0.0_low\n0,1\n0.5,0.5\n1,0.25\n");
  CHECK(s.channel("B_2_1_s0.0_low")[2] == 0.25);
  CHECK_THROWS_AS(s.add_channel("short", {1.0}), DimensionError);
  CHECK_THROWS_AS(s.add_channel("B_2_1_s0.0_low", {1, 1, 1}), ParameterError);

  NormSeries bad_time({0.0, 0.0});
  CHECK_THROWS_AS(bad_time.validate(), PreconditionError);
  NormSeries negative({0.0, 1.0});
  negative.add_channel("x", {1.0, -1.0});
  CHECK_THROWS_AS(negative.validate(), PreconditionError);

  CHECK(channel_name({0.0, 2.0}, FrequencyRange::Low) == "B_2_1_s0.0_low");
  CHECK(channel_name({2.0 / 3 - 1, 3.0, INFINITY}, FrequencyRange::High, true) == "Linf_B_3_1_s-0.3_high");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("cancellation identity") {
  auto grid = make_grid(2, 32);
  const DyadicPartition P(grid);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const State s = random_state(grid, seed);
    for (int j = P.j_min(); j <= P.j_max(); ++j) CHECK(cancellation_residual(s, P, j) <= 1e-11);
  }
  const State s = random_state(grid, 1);
  CHECK(cancellation_residual(State(0.0, s.u, Field(grid, Rank::SymTensor)), P, 1) == 0.0);

  SUBCASE("a non-symmetric stress breaks it") {
    std::mt19937_64 rng(8);
    const Field full = random_band_field(grid, Rank::Tensor, 1, 6, rng);
    double worst = 0;
    for (int j = P.j_min(); j <= P.j_max(); ++j) worst = std::max(worst, detail::cancellation_pairing(s.u, full, P, j));
    CHECK(worst >= 0.1);
  }
  SUBCASE("precondition") {
    std::mt19937_64 rng(2);
    const State bad(0.0, random_band_field(grid, Rank::Vector, 1, 4, rng), s.tau);
    CHECK_THROWS_AS(cancellation_residual(bad, P, 0), PreconditionError);
  }
}

TEST_CASE("transport identity") {
  auto grid = make_grid(2, 32);
  const DyadicPartition P(grid);
  const State s = random_state(grid, 3);
  for (auto target : {TransportTarget::Velocity, TransportTarget::Stress, TransportTarget::Gamma, TransportTarget::W})
    for (int j = P.j_min(); j <= P.j_max(); ++j) CHECK(transport_residual(s, P, j, target) <= 1e-10);
  CHECK(transport_residual(State(0.0, Field(grid, Rank::Vector), s.tau), P, 1, TransportTarget::Stress) == 0.0);
  CHECK(parse_transport_target("gamma") == TransportTarget::Gamma);
  CHECK_THROWS_AS(parse_transport_target("p"), ParameterError);

  SUBCASE("compressible probe") {
    std::mt19937_64 rng(6);
    const Field v = dealias(random_band_field(grid, Rank::Vector, 1, 4, rng));
    double worst = 0;
    for (int j = P.j_min(); j <= P.j_max(); ++j) worst = std::max(worst, detail::transport_pairing(v, s.tau, P, j));
    CHECK(worst >= 1e-3);
    CHECK_THROWS_AS(transport_residual(State(0.0, v, s.tau), P, 0, TransportTarget::Stress), PreconditionError);
  }
}

TEST_CASE("identity suite") {
  auto grid = make_grid(2, 32);
  const DyadicPartition P(grid);
  for (const auto& row : identity_suite(random_state(grid, 12), P)) {
    INFO(row.name << " = " << row.value);
    CHECK(row.pass());
  }
}

TEST_CASE("block energy ledger") {
  SUBCASE("linear run at fine cadence") {
    SimConfig c = small_run();
    c.nonlinear = false;
    c.dt = c.output_interval = 1e-4;
    c.t_end = 0.01;
    const Trajectory tr = simulate(c);
    for (int j = tr.partition->j_min(); j <= tr.partition->j_max(); ++j) {
      const EnergyLedger L = block_energy_balance(tr, j);
      CHECK(L.rows.size() == tr.states.size() - 2);
      CHECK(L.max_relative_residual <= 1e-6);
      for (const auto& r : L.rows) {
        CHECK(r.commutator == 0.0);
        CHECK(r.constitutive == 0.0);
      }
    }
  }
  SUBCASE("nonlinear run at cadence 1e-3") {
    SimConfig c = small_run();
    c.physics.b = 0.5;
    c.initial.amplitude = c.initial.stress_amplitude = 0.1;
    const Trajectory tr = simulate(c);
    const auto& P = *tr.partition;
    for (int j = P.j_min(); j <= P.j_max(); ++j) {
      const EnergyLedger L = block_energy_balance(tr, j);
      for (const auto& r : L.rows) {
        if (!r.cadence_warning) CHECK(r.relative_residual <= 1e-4);
        // annulus support bounds the Bernstein constant
        if (!std::isnan(r.bernstein_c1)) {
          CHECK(r.bernstein_c1 >= 0.5625);
          CHECK(r.bernstein_c1 <= 64.0 / 9);
        }
      }
    }
  }
  SUBCASE("needs stored states") {
    SimConfig c = small_run();
    c.keep_states = false;
    CHECK_THROWS_AS(block_energy_balance(simulate(c), 0), PreconditionError);
  }
}

TEST_CASE("hybrid functional") {
  SUBCASE("zero trajectory") {
    SimConfig c = small_run();
    const Trajectory tr = simulate(c, State(make_grid(2, 32)));
    const XFunctional X = hybrid_functional(tr, 3.0);
    for (double v : X.total) CHECK(v == 0.0);
    CHECK(std::isnan(X.ratio.back()));
  }
  SUBCASE("heat decay of one low block") {
    // |ξ| = 6 lies in block 2 alone; ∫₀^∞ 2^{2·2}e^{−36t}dt = 16/36
    auto grid = make_grid(2, 32);
    PhysicalField u(grid, Rank::Vector);
    for (Index p = 0; p < grid->size(); ++p) u.samples()(p, 0) = std::sin(6 * u.coordinate(p, 1));
    const State s0(0.0, transform(u), Field(grid, Rank::SymTensor));
    SimConfig c;
    c.points = 32;
    c.dt = 1e-3;
    c.t_end = 1.0;
    c.output_interval = 1e-3;
    c.nonlinear = false;
    c.physics.K2 = 0.0;
    const Trajectory tr = simulate(c, s0);
    const XFunctional X = hybrid_functional(tr, 3.0);
    const double u0 = l2_norm(s0.u);
    CHECK(X.total.front() == doctest::Approx(u0).epsilon(1e-12));
    CHECK(X.components[1].back() == doctest::Approx(16.0 / 36 * u0).epsilon(1e-3));
    CHECK(X.total.back() == doctest::Approx((1 + 16.0 / 36) * u0).epsilon(1e-3));
    CHECK(X.monotone);
  }
  SUBCASE("initial value is the data norm and the series is monotone") {
    SimConfig c = small_run();
    c.initial.k_max = 8;
    const Trajectory tr = simulate(c);
    const XFunctional X = hybrid_functional(tr, 3.0);
    const auto& P = *tr.partition;
    const State s0 = make_initial_data(c.initial, make_grid(2, 32));
    const double x0 = besov_norm(s0.u, P, {0.0, 2.0}, FrequencyRange::Low) +
                      besov_norm(s0.tau, P, {0.0, 2.0}, FrequencyRange::Low) +
                      besov_norm(s0.u, P, {2.0 / 3 - 1, 3.0}, FrequencyRange::High) +
                      besov_norm(s0.tau, P, {2.0 / 3, 3.0}, FrequencyRange::High);
    CHECK(X.total.front() == doctest::Approx(x0).epsilon(1e-12));
    CHECK(X.monotone);
    for (std::size_t k = 1; k < X.total.size(); ++k) CHECK(X.total[k] >= X.total[k - 1]);
    CHECK(X.as_series().names().size() == 9);
  }
  SUBCASE("exponent checks") {
    SimConfig c = small_run();
    const Trajectory tr = simulate(c);
    CHECK_THROWS_AS(hybrid_functional(tr, 4.0), ParameterError);
    CHECK_THROWS_AS(hybrid_functional(tr, 2.5), ParameterError);  // channels were recorded at p = 3
  }
}

TEST_CASE("power-law fits") {
  const std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> y;
  for (double e : eps) y.push_back(3 * std::pow(e, 0.7));
  const PowerLawFit f = fit_power_law(eps, y);
  CHECK(f.slope == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.residual <= 1e-12);
  CHECK_THROWS_AS(fit_power_law({1, 2, 4}, {1, 2, 3}), ParameterError);
  CHECK_THROWS_AS(fit_power_law({1, 1.5, 2, 4}, {1, 2, 3, 4}), ParameterError);  // under three octaves

  SUBCASE("oscillating data") {
    ScalingSetup setup;
    setup.points = 256;
    setup.split = 1;
    const PowerLawFit p3 = scaling_fit(setup, eps, 2);
    CHECK(p3.slope == doctest::Approx(1.0 / 3).epsilon(0.3));
    setup.amplitude = 2.0;
    const PowerLawFit doubled = scaling_fit(setup, eps, 2);
    CHECK(doubled.slope == doctest::Approx(p3.slope).epsilon(1e-10));
    CHECK(doubled.intercept - p3.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    setup.amplitude = 1.0;
    setup.p = 2.0;
    CHECK(std::abs(scaling_fit(setup, eps, 2).slope) <= 0.15);
  }
}

TEST_CASE("estimate chain") {
  SUBCASE("zero data is undefined everywhere") {
    const Trajectory tr = simulate(small_run(), State(make_grid(2, 32)));
    for (const auto& q : estimate_chain_monitor(tr).inequalities) {
      CHECK(std::isnan(q.sup_ratio));
      CHECK_FALSE(q.growing);
    }
  }
  SUBCASE("small data gives finite constants") {
    SimConfig c = small_run();
    c.dt = 0.01;
    c.t_end = 2;
    c.output_interval = 0.05;
    c.physics.b = 0.5;
    c.initial.k_max = 8;
    const ChainReport rep = estimate_chain_monitor(simulate(c));
    REQUIRE(rep.inequalities.size() == 6);
    for (const auto& q : rep.inequalities) {
      INFO(q.name);
      CHECK(std::isfinite(q.sup_ratio));
      CHECK(q.sup_ratio > 0);
    }
    // at t = 0 the low energy inequality is an equality
    CHECK(rep.inequalities[0].ratio.front() == doctest::Approx(1.0));
    CHECK(rep.as_series().names().size() == 12);
  }
}

TEST_CASE("lemma constants") {
  const LemmaStudy s = lemma_constants(2, 64, 3, 99);
  CHECK(s.constants.size() == 9);
  for (const auto& c : s.constants) {
    INFO(c.name);
    CHECK(c.all_finite);
    CHECK(c.max_ratio > 0);
  }
  CHECK(s["bernstein_gradient"].max_ratio <= 8.0 / 3 * std::sqrt(2.0));
  CHECK_THROWS_AS(lemma_constants(2, 32, 3, 0), ConfigError);
  CHECK_THROWS_AS(s["nope"], ParameterError);
}
