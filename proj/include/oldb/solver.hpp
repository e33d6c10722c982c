#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oldb/constitutive.hpp"
#include "oldb/littlewood_paley.hpp"

namespace oldb {

// (u, τ) at time t; u divergence-free, τ stored packed (hence symmetric).
struct State {
  double time = 0.0;
  Field u;
  Field tau;

  State(GridPtr grid, double t = 0.0)
      : time(t), u(grid, Rank::Vector), tau(grid, Rank::SymTensor) {}
  State(double t, Field velocity, Field stress) : time(t), u(std::move(velocity)), tau(std::move(stress)) {}

  const Grid& grid() const { return u.grid(); }
  const GridPtr& grid_ptr() const { return u.grid_ptr(); }
};

enum class InitialKind { RandomBand, Oscillating, TaylorGreen, File };

const char* to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct InitialDataSpec {
  InitialKind kind = InitialKind::RandomBand;
  double amplitude = 1e-3;         // L² norm of u₀ (random band), peak scale otherwise
  double stress_amplitude = 1e-3;  // L² norm of τ₀ (random band, Taylor-Green)
  double k_min = 1.0;              // random band shell
  double k_max = 4.0;
  double decay = 0.0;              // random band spectral slope |ξ|^{-decay}
  double epsilon = 0.125;          // oscillating: u₀ = sin(x₁/ε)φ(x)e₂, 1/ε integer
  double envelope_width = 0.5;     // oscillating: periodic Gaussian width
  std::filesystem::path file;      // snapshot holding u then τ
  std::uint64_t seed = 0;
};

struct SimConfig {
  int dim = 2;
  int points = 64;
  ConstitutiveParams physics;
  double dt = 1e-3;
  double t_end = 1.0;
  double output_interval = 0.1;
  int split = DyadicPartition::kDefaultSplit;
  double lebesgue_p = 3.0;   // integrability of the high-frequency channels
  bool nonlinear = true;     // false drops u·∇u, u·∇τ and F(τ, ∇u)
  double cfl = 0.5;
  bool keep_states = false;  // store every output state in the trajectory
  InitialDataSpec initial;

  void validate() const;
  int total_steps() const;
  int steps_per_output() const;
};

// Γ = Λ⁻¹𝒫div τ, w = ΛΓ − u, 𝒢 = u − Λ⁻¹Γ.
struct EffectiveVariables {
  Field gamma;
  Field w;
  Field g;
};

EffectiveVariables effective_variables(const State& state);

struct Rates {
  Field du;
  Field dtau;
};

// du/dt = 𝒫(−u·∇u + K₁div τ) + μΔu, dτ/dt = −u·∇τ − F(τ, ∇u) + K₂D(u).
// With `nonlinear` false only the linear coupling and viscosity remain.
Rates nonlinear_rhs(const State& state, const ConstitutiveParams& params, bool nonlinear = true);

// Integrating-factor RK2: the viscous factor e^{−μ|ξ|²dt} acts exactly on û,
// every other term (transport, constitutive, coupling) is explicit Heun in
// the transformed variable:
//   k₁ = N(yₙ),  y* = E(yₙ + dt k₁),  k₂ = N(y*),  yₙ₊₁ = E yₙ + dt/2 (E k₁ + k₂).
// After each step u is re-projected and both fields are dealiased.
class Integrator {
 public:
  Integrator(GridPtr grid, ConstitutiveParams params, double dt, bool nonlinear = true, double cfl = 0.5);

  State step(const State& state) const;
  double dt() const { return dt_; }
  // Largest stable advective step for the current velocity.
  double cfl_limit(const State& state) const;

 private:
  Rates explicit_rates(const State& state) const;
  Field viscous(const Field& u) const;

  GridPtr grid_;
  ConstitutiveParams params_;
  double dt_;
  bool nonlinear_;
  double cfl_;
  Eigen::ArrayXd factor_;
};

State step(const State& state, const ConstitutiveParams& params, double dt, bool nonlinear = true);

// Per-snapshot measurements feeding the diagnostics. Block arrays are indexed
// j − j_min of the trajectory partition.
struct SnapshotRecord {
  double time = 0.0;
  Eigen::ArrayXd u_l2, tau_l2, gamma_l2;  // ‖Δ̇_j ·‖_{L²}
  Eigen::ArrayXd u_lp, tau_lp, gamma_lp;  // ‖Δ̇_j ·‖_{L^p}, p = lebesgue_p
  double divergence = 0.0;       // spectral div residual of u
  double symmetry = 0.0;         // asymmetry of F(τ, ∇u) in full storage
  double imaginary = 0.0;        // realness residual of u and τ
  double max_velocity = 0.0;
};

SnapshotRecord measure(const State& state, const DyadicPartition& P, double p, double b);

struct Trajectory {
  SimConfig config;
  std::shared_ptr<const DyadicPartition> partition;
  std::vector<SnapshotRecord> records;
  std::vector<State> states;  // filled when config.keep_states
  bool blew_up = false;
  double blow_up_time = 0.0;
  std::string blow_up_message;

  std::vector<double> times() const;
};

Trajectory simulate(const SimConfig& config);
Trajectory simulate(const SimConfig& config, const State& initial);

State make_initial_data(const InitialDataSpec& spec, GridPtr grid);

// Periodic Gaussian bump Π_a exp(−(1 − cos(x_a − π))/w²) sampled on the grid.
PhysicalField periodic_envelope(GridPtr grid, double width);

}  // namespace oldb
