#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oldb/solver.hpp"

namespace oldb {

// Time series of named nonnegative channels, written as CSV with a mandatory
// header row (optionally preceded by "# key=value" comment lines).
class NormSeries {
 public:
  explicit NormSeries(std::vector<double> times);

  void add_channel(std::string name, std::vector<double> values);
  void add_comment(std::string key, std::string value);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& channel(const std::string& name) const;
  std::size_t size() const { return times_.size(); }

  // Strictly increasing times; finite, nonnegative values.
  void validate() const;
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
  std::vector<std::pair<std::string, std::string>> comments_;
};

// Channel label of a norm, e.g. "B_2_1_s-0.0_low" or "Linf_B_3_1_s0.3_high".
std::string channel_name(const BesovSpec& spec, FrequencyRange range, bool time_norm = false);

// Shortest round-trip decimal form of a double.
std::string format_number(double value);

// |⟨Δ̇_j𝒫div τ, Δ̇_j u⟩ + ⟨Δ̇_j D(u), Δ̇_j τ⟩| / (‖Δ̇_j u‖‖Δ̇_j τ‖); 0 when either
// block vanishes. Requires div u = 0 and a symmetric τ.
double cancellation_residual(const State& state, const DyadicPartition& P, int j);

namespace detail {
// Same pairing without the symmetry precondition; τ may be a full tensor.
double cancellation_pairing(const Field& u, const Field& tau, const DyadicPartition& P, int j);
double transport_pairing(const Field& u, const Field& z, const DyadicPartition& P, int j);
}  // namespace detail

enum class TransportTarget { Velocity, Stress, Gamma, W };
TransportTarget parse_transport_target(const std::string& name);
const char* to_string(TransportTarget t);

// |⟨u·∇Δ̇_j z, Δ̇_j z⟩| / (‖u‖_{L∞}‖Δ̇_j z‖²_{L²}) with dealiased products.
double transport_residual(const State& state, const DyadicPartition& P, int j, TransportTarget target);

struct IdentityCheck {
  std::string name;
  double value = 0;  // worst case over blocks
  double tolerance = 0;
  bool pass() const { return value <= tolerance; }
};

// Exact discrete identities on a state: divergence, cancellation and the four
// transport pairings over every block, the effective-variable relations, the
// partition of unity and block reconstruction.
std::vector<IdentityCheck> identity_suite(const State& state, const DyadicPartition& P);

// One row per interior snapshot of a trajectory with stored states.
struct EnergyLedgerRow {
  double time = 0;
  double energy = 0;         // ½(‖Δ̇_j u‖² + ‖Δ̇_j τ‖²)
  double derivative_fd = 0;  // centered difference of the energy
  double viscous = 0;        // −μ‖∇Δ̇_j u‖²
  double coupling = 0;       // K₁⟨Δ̇_j𝒫div τ, Δ̇_j u⟩ + K₂⟨Δ̇_j D(u), Δ̇_j τ⟩
  double commutator = 0;     // ⟨[u·∇, Δ̇_j]u, Δ̇_j u⟩ + ⟨[u·∇, Δ̇_j]τ, Δ̇_j τ⟩
  double constitutive = 0;   // −⟨Δ̇_j F(τ, ∇u), Δ̇_j τ⟩
  double residual = 0;       // derivative_fd − (viscous + coupling + commutator + constitutive)
  double relative_residual = 0;
  double bernstein_c1 = 0;   // ‖∇Δ̇_j u‖² / (2^{2j}‖Δ̇_j u‖²), NaN for an empty block
  bool cadence_warning = false;
};

struct EnergyLedger {
  int block = 0;
  std::vector<EnergyLedgerRow> rows;
  bool cadence_warning = false;
  double max_relative_residual = 0;
};

EnergyLedger block_energy_balance(const Trajectory& traj, int j);

// The seven channels of X(t), in order:
//   ‖(u^ℓ,τ^ℓ)‖_{L̃^∞(Ḃ^{n/2−1}_{2,1})}, ‖u^ℓ‖_{L¹(Ḃ^{n/2+1}_{2,1})}, ‖Γ^ℓ‖_{L¹(Ḃ^{n/2+1}_{2,1})},
//   ‖u^h‖_{L̃^∞(Ḃ^{n/p−1}_{p,1})}, ‖τ^h‖_{L̃^∞(Ḃ^{n/p}_{p,1})}, ‖Γ^h‖_{L¹(Ḃ^{n/p}_{p,1})},
//   ‖u^h‖_{L¹(Ḃ^{n/p+1}_{p,1})}.
struct XFunctional {
  static constexpr std::array<const char*, 7> kNames = {
      "low_sup_u_tau", "low_int_u", "low_int_gamma", "high_sup_u", "high_sup_tau", "high_int_gamma", "high_int_u"};

  double p = 3.0;
  int split = 2;
  std::vector<double> times;
  std::array<std::vector<double>, 7> components;
  std::vector<double> total;
  std::vector<double> ratio;  // X(t)/X(0), NaN when X(0) = 0
  bool monotone = true;

  NormSeries as_series() const;
};

// Assemble X(t) from the trajectory channels. `p` must equal the trajectory's
// recorded integrability and lie in [2, 4); the split defaults to the
// trajectory partition's.
XFunctional hybrid_functional(const Trajectory& traj, double p, std::optional<int> split = std::nullopt);

struct PowerLawFit {
  std::vector<double> x, y;
  double slope = 0;
  double intercept = 0;  // log y at log x = 0
  double residual = 0;   // RMS residual of the log-log fit
};

// Least squares of log y against log x. At least four points spanning three
// octaves in x are required.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingSetup {
  int dim = 2;
  int points = 256;
  int split = DyadicPartition::kDefaultSplit;
  double p = 3.0;
  double envelope_width = 0.5;
  double amplitude = 1.0;
};

// ‖u₀^ℓ‖_{Ḃ^{n/2−1}_{2,1}} + ‖u₀^h‖_{Ḃ^{n/p−1}_{p,1}} for oscillating data at ε.
double oscillating_data_norm(const ScalingSetup& setup, double epsilon);

// Norms over ε fitted against ε; `threads` caps the per-ε fan-out.
PowerLawFit scaling_fit(const ScalingSetup& setup, const std::vector<double>& epsilons, int threads = 1);

struct ChainInequality {
  std::string name;
  std::vector<double> lhs, rhs, ratio;  // ratio NaN where both sides vanish
  double sup_ratio = 0;                 // NaN if never defined
  bool growing = false;                 // late-time ratio well above early-time ratio
};

struct ChainReport {
  std::vector<double> times;
  std::vector<ChainInequality> inequalities;
  NormSeries as_series() const;
};

// Empirical constants of the Bernstein, product and commutator estimates over
// randomized draws. Draw k uses the generator seeded with seed + k, and fields
// come from fixed wavenumber bands, so the same draws exist on every grid
// that resolves the bands (N ≥ 64).
struct LemmaConstant {
  std::string name;
  double max_ratio = 0;
  bool all_finite = true;
};

struct LemmaStudy {
  int dim = 2;
  int points = 64;
  int draws = 200;
  std::uint64_t seed = 0;
  double p = 3.0;
  std::vector<LemmaConstant> constants;

  const LemmaConstant& operator[](const std::string& name) const;
  NormSeries as_series() const;  // one row per inequality
};

LemmaStudy lemma_constants(int dim, int points, int draws, std::uint64_t seed, double p = 3.0);

// Running empirical constants of the low/high frequency estimate chain with
// every implicit constant set to 1.
ChainReport estimate_chain_monitor(const Trajectory& traj);

}  // namespace oldb
