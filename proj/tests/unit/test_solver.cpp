#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oldb/linear_modes.hpp"
#include "oldb/random_fields.hpp"
#include "oldb/solver.hpp"

using namespace oldb;

namespace {

// Fourth-order periodic central difference along `axis` of a 2D sample column.
Eigen::VectorXd fd(const Eigen::VectorXd& f, int N, int axis) {
  const double h = 2 * M_PI / N;
  Eigen::VectorXd out(f.size());
  auto at = [&](int i0, int i1) { return f(((i0 + N) % N) * N + (i1 + N) % N); };
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1) {
      const int a0 = axis == 0, a1 = axis == 1;
      out(i0 * N + i1) = (-at(i0 + 2 * a0, i1 + 2 * a1) + 8 * at(i0 + a0, i1 + a1) - 8 * at(i0 - a0, i1 - a1) +
                          at(i0 - 2 * a0, i1 - 2 * a1)) /
                         (12 * h);
    }
  return out;
}

State random_state(GridPtr grid, std::uint64_t seed, double amp = 1.0, double kmax = 4) {
  std::mt19937_64 rng(seed);
  Field u = random_solenoidal_field(grid, 1, kmax, rng);
  Field tau = random_band_field(grid, Rank::SymTensor, 1, kmax, rng);
  tau *= 1.0 / l2_norm(tau);
  return State(0.0, u * amp, tau * amp);
}

double distance(const State& a, const State& b) { return l2_norm(a.u - b.u) + l2_norm(a.tau - b.tau); }

}  // namespace

TEST_CASE("rates of trivial states") {
  auto grid = make_grid(2, 16);
  const ConstitutiveParams prm;
  SUBCASE("zero state") {
    const Rates r = nonlinear_rhs(State(grid), prm);
    CHECK(l2_norm(r.du) == 0.0);
    CHECK(l2_norm(r.dtau) == 0.0);
  }
  SUBCASE("u = 0 leaves only the stress forcing") {
    std::mt19937_64 rng(3);
    const State s(0.0, Field(grid, Rank::Vector), random_band_field(grid, Rank::SymTensor, 1, 5, rng));
    const Rates r = nonlinear_rhs(s, prm);
    CHECK(l2_norm(r.du - leray_project(divergence(s.tau))) <= 1e-14 * l2_norm(r.du));
    CHECK(l2_norm(r.dtau) == 0.0);
    CHECK(divergence_residual(r.du) <= 1e-11);
  }
}

TEST_CASE("single-mode rates against a finite-difference evaluation") {
  constexpr int N = 256;
  auto grid = make_grid(2, N);
  PhysicalField u(grid, Rank::Vector);
  for (Index p = 0; p < grid->size(); ++p) {
    u.samples()(p, 0) = std::sin(u.coordinate(p, 1));
    u.samples()(p, 1) = std::sin(u.coordinate(p, 0));
  }
  const State s(0.0, transform(u), Field(grid, Rank::SymTensor));
  const Rates r = nonlinear_rhs(s, ConstitutiveParams{});

  // oracle: u·∇u, Δu and D(u) by finite differences, pressure removed spectrally
  PhysicalField adv(grid, Rank::Vector), lap(grid, Rank::Vector), D(grid, Rank::SymTensor);
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd ua = u.samples().col(a);
    const Eigen::VectorXd d0 = fd(ua, N, 0), d1 = fd(ua, N, 1);
    adv.samples().col(a) = u.samples().col(0).cwiseProduct(d0) + u.samples().col(1).cwiseProduct(d1);
    lap.samples().col(a) = fd(d0, N, 0) + fd(d1, N, 1);
  }
  D.samples().col(sym_index(0, 0, 2)) = fd(u.samples().col(0), N, 0);
  D.samples().col(sym_index(1, 1, 2)) = fd(u.samples().col(1), N, 1);
  D.samples().col(sym_index(0, 1, 2)) = 0.5 * (fd(u.samples().col(0), N, 1) + fd(u.samples().col(1), N, 0));
  const Field du_oracle = leray_project(transform(adv)) * -1.0 + transform(lap);

  const PhysicalField du = inverse_transform(r.du), want = inverse_transform(du_oracle);
  CHECK((du.samples() - want.samples()).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((inverse_transform(r.dtau).samples() - D.samples()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("pure heat decay is exact under the integrating factor") {
  auto grid = make_grid(2, 16);
  PhysicalField u(grid, Rank::Vector);
  for (Index p = 0; p < grid->size(); ++p) u.samples()(p, 0) = std::sin(u.coordinate(p, 1));
  const State s0(0.0, transform(u), Field(grid, Rank::SymTensor));
  ConstitutiveParams prm;
  prm.K2 = 0.0;  // no stress production, so τ stays zero and u decouples
  const Integrator I(grid, prm, 0.05, false);
  State s = s0;
  for (int k = 0; k < 20; ++k) s = I.step(s);
  CHECK(l2_norm(s.u - s0.u * std::exp(-1.0)) <= 1e-15 * l2_norm(s0.u));
  CHECK(l2_norm(s.tau) == 0.0);
}

TEST_CASE("linear step follows the mode propagator with third-order local error") {
  auto grid = make_grid(2, 16);
  const ConstitutiveParams prm;
  const auto coeffs = SymbolCoefficients::from_params(prm);
  const State s0 = random_state(grid, 11, 1.0, 3);
  const Field g0 = effective_variables(s0).gamma;

  auto one_step_error = [&](double dt) {
    const State s = step(s0, prm, dt, false);
    const Field g = effective_variables(s).gamma;
    double err = 0;
    for (Index m = 0; m < grid->size(); ++m) {
      const double r = grid->norm()(m);
      if (r == 0) continue;
      const Eigen::Matrix2d E = propagator(r, dt, coeffs);
      for (int c = 0; c < 2; ++c) {
        const auto G = E(0, 0) * g0.coeffs()(m, c) + E(0, 1) * s0.u.coeffs()(m, c);
        const auto U = E(1, 0) * g0.coeffs()(m, c) + E(1, 1) * s0.u.coeffs()(m, c);
        err = std::max({err, std::abs(G - g.coeffs()(m, c)), std::abs(U - s.u.coeffs()(m, c))});
      }
    }
    return err;
  };
  const double e1 = one_step_error(0.02), e2 = one_step_error(0.01);
  CHECK(std::log2(e1 / e2) >= 2.8);
  CHECK(e2 <= 1e-5);
}

TEST_CASE("step guards") {
  auto grid = make_grid(2, 16);
  const State s = random_state(grid, 5, 10.0);
  CHECK_THROWS_AS(Integrator(grid, ConstitutiveParams{}, 1.0).step(s), StepSizeError);
  CHECK_THROWS_AS(Integrator(grid, ConstitutiveParams{}, -1.0), StepSizeError);
  ConstitutiveParams bad;
  bad.b = 2;
  CHECK_THROWS_AS(Integrator(grid, bad, 0.01), ParameterError);
}

TEST_CASE("simulate") {
  SimConfig c;
  c.points = 16;
  c.dt = 0.01;
  c.t_end = 0.5;
  c.output_interval = 0.1;
  c.keep_states = true;

  SUBCASE("zero data stays zero") {
    const Trajectory tr = simulate(c, State(make_grid(2, 16)));
    REQUIRE(tr.records.size() == 6);
    for (const auto& s : tr.states) CHECK(l2_norm(s.u) + l2_norm(s.tau) == 0.0);
    CHECK(tr.records.back().time == doctest::Approx(0.5));
  }
  SUBCASE("invariants along a nonlinear run") {
    c.physics.b = 0.5;
    c.initial.amplitude = c.initial.stress_amplitude = 0.3;
    const Trajectory tr = simulate(c);
    CHECK_FALSE(tr.blew_up);
    for (const auto& r : tr.records) {
      CHECK(r.divergence <= 1e-9);
      CHECK(r.symmetry <= 1e-9);
      CHECK(r.imaginary <= 1e-10);
    }
  }
  SUBCASE("non-finite data is flagged, not thrown") {
    State s = random_state(make_grid(2, 16), 1);
    s.tau.coeffs()(1, 0) = std::numeric_limits<double>::quiet_NaN();
    const Trajectory tr = simulate(c, s);
    CHECK(tr.blew_up);
    CHECK(tr.records.size() == 1);
  }
  SUBCASE("cadence must divide the horizon") {
    c.output_interval = 0.015;
    CHECK_THROWS_AS(simulate(c), ConfigError);
  }
}

TEST_CASE("second-order global accuracy") {
  SimConfig c;
  c.points = 16;
  c.t_end = 0.5;
  c.physics.b = 0.5;
  c.initial.amplitude = c.initial.stress_amplitude = 0.5;
  c.keep_states = true;
  std::vector<State> finals;
  for (double dt : {0.02, 0.01, 0.005}) {
    c.dt = dt;
    c.output_interval = 0.5;
    finals.push_back(simulate(c).states.back());
  }
  const double order = std::log2(distance(finals[0], finals[1]) / distance(finals[1], finals[2]));
  CHECK(order >= 1.8);
}

TEST_CASE("effective variables") {
  auto grid = make_grid(2, 16);
  SUBCASE("no stress") {
    const State s = random_state(grid, 2);
    const State s0(0.0, s.u, Field(grid, Rank::SymTensor));
    const EffectiveVariables ev = effective_variables(s0);
    CHECK(l2_norm(ev.gamma) == 0.0);
    CHECK(l2_norm(ev.w + s.u) == 0.0);
    CHECK(l2_norm(ev.g - s.u) == 0.0);
  }
  SUBCASE("stress shaped like D(u) for one mode") {
    // div D(u) = Δu/2 on divergence-free u, hence Γ = −|ξ|u/2
    PhysicalField u(grid, Rank::Vector);
    for (Index p = 0; p < grid->size(); ++p) {
      const double x = u.coordinate(p, 0), y = u.coordinate(p, 1);
      u.samples()(p, 0) = std::sin(y - 2 * x);
      u.samples()(p, 1) = 2 * std::sin(y - 2 * x);
    }
    const Field uh = transform(u);
    REQUIRE(divergence_residual(uh) <= 1e-14);
    const EffectiveVariables ev = effective_variables(State(0.0, uh, symmetric_gradient(uh)));
    CHECK(l2_norm(ev.gamma + uh * (std::sqrt(5.0) / 2)) <= 1e-13 * l2_norm(uh));
  }
  SUBCASE("random state") {
    const State s = random_state(grid, 9);
    const EffectiveVariables ev = effective_variables(s);
    CHECK(l2_norm(leray_project(ev.gamma) - ev.gamma) <= 1e-11 * l2_norm(ev.gamma));
    CHECK(l2_norm(lambda_power(ev.g, 1.0) - (lambda_power(s.u, 1.0) - ev.gamma)) <= 1e-11 * l2_norm(s.u));
  }
}

TEST_CASE("initial data") {
  auto grid = make_grid(2, 64);
  InitialDataSpec spec;
  SUBCASE("random band is solenoidal and normalised") {
    spec.seed = 4;
    const State s = make_initial_data(spec, grid);
    CHECK(divergence_residual(s.u) <= 1e-12);
    CHECK(l2_norm(s.u) == doctest::Approx(spec.amplitude).epsilon(1e-12));
    CHECK(l2_norm(s.tau) == doctest::Approx(spec.stress_amplitude).epsilon(1e-12));
    const State again = make_initial_data(spec, grid);
    CHECK(distance(s, again) == 0.0);
  }
  SUBCASE("oscillating data concentrates at the carrier") {
    spec.kind = InitialKind::Oscillating;
    spec.epsilon = 1.0 / 8;
    const State s = make_initial_data(spec, grid);
    double near = 0, total = 0;
    for (Index m = 0; m < grid->size(); ++m) {
      const double e = s.u.coeffs().row(m).squaredNorm();
      total += e;
      if (std::abs(std::abs(grid->wavenumber(m, 0)) - 8) <= 4) near += e;
    }
    CHECK(near >= 0.99 * total);
    CHECK(divergence_residual(s.u) <= 1e-12);
    CHECK(l2_norm(s.tau) == 0.0);
  }
  SUBCASE("epsilon must give an integer carrier") {
    spec.kind = InitialKind::Oscillating;
    spec.epsilon = 0.3;
    CHECK_THROWS_AS(make_initial_data(spec, grid), ConfigError);
    spec.epsilon = 1.0 / 64;  // beyond the dealiased range of 64 points
    CHECK_THROWS_AS(make_initial_data(spec, grid), ConfigError);
  }
  SUBCASE("random band beyond the dealiased range") {
    spec.k_max = 30;
    CHECK_THROWS_AS(make_initial_data(spec, grid), ConfigError);
  }
  SUBCASE("names round trip") {
    for (auto k : {InitialKind::RandomBand, InitialKind::Oscillating, InitialKind::TaylorGreen, InitialKind::File})
      CHECK(parse_initial_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_initial_kind("vortex"), ConfigError);
  }
}
