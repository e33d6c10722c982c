#include <cmath>
#include <numbers>
#include <random>

#include "oldb/io.hpp"
#include "oldb/random_fields.hpp"
#include "oldb/solver.hpp"

namespace oldb {

const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::RandomBand: return "random-band";
    case InitialKind::Oscillating: return "oscillating";
    case InitialKind::TaylorGreen: return "taylor-green";
    case InitialKind::File: return "file";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "random-band") return InitialKind::RandomBand;
  if (name == "oscillating") return InitialKind::Oscillating;
  if (name == "taylor-green") return InitialKind::TaylorGreen;
  if (name == "file") return InitialKind::File;
  throw ConfigError("unknown initial data kind '" + name + "'");
}

PhysicalField periodic_envelope(GridPtr grid, double width) {
  if (!(width > 0)) throw ConfigError("envelope width must be positive");
  PhysicalField phi(grid, Rank::Scalar);
  const double inv = 1.0 / (width * width);
  for (Index p = 0; p < grid->size(); ++p) {
    double e = 0;
    for (int a = 0; a < grid->dim(); ++a) e += 1.0 - std::cos(phi.coordinate(p, a) - std::numbers::pi);
    phi.samples()(p, 0) = std::exp(-e * inv);
  }
  return phi;
}

namespace {

void normalize(Field& f, double target) {
  const double n = l2_norm(f);
  if (n > 0) f *= target / n;
}

State random_band(const InitialDataSpec& spec, GridPtr grid) {
  if (spec.k_max > grid->retained_max())
    throw ConfigError("random band k_max exceeds the dealiased range " + std::to_string(grid->retained_max()));
  std::mt19937_64 rng(spec.seed);
  Field u = leray_project(random_band_field(grid, Rank::Vector, spec.k_min, spec.k_max, rng, spec.decay));
  Field tau = random_band_field(grid, Rank::SymTensor, spec.k_min, spec.k_max, rng, spec.decay);
  normalize(u, spec.amplitude);
  normalize(tau, spec.stress_amplitude);
  return State(0.0, std::move(u), std::move(tau));
}

State oscillating(const InitialDataSpec& spec, GridPtr grid) {
  if (!(spec.epsilon > 0)) throw ConfigError("epsilon must be positive");
  const double inv = 1.0 / spec.epsilon;
  const int m = static_cast<int>(std::lround(inv));
  if (m < 1 || std::abs(inv - m) > 1e-9 * inv)
    throw ConfigError("1/epsilon must be an integer frequency, got " + std::to_string(inv));
  if (m > grid->retained_max())
    throw ConfigError("oscillation frequency " + std::to_string(m) + " exceeds the dealiased range");
  const PhysicalField phi = periodic_envelope(grid, spec.envelope_width);
  PhysicalField u(grid, Rank::Vector);
  for (Index p = 0; p < grid->size(); ++p)
    u.samples()(p, 1) = spec.amplitude * std::sin(m * u.coordinate(p, 0)) * phi.samples()(p, 0);
  Field uh = dealias(leray_project(transform(u)));
  return State(0.0, std::move(uh), Field(grid, Rank::SymTensor));
}

State taylor_green(const InitialDataSpec& spec, GridPtr grid) {
  PhysicalField u(grid, Rank::Vector);
  PhysicalField tau(grid, Rank::SymTensor);
  const int n = grid->dim();
  for (Index p = 0; p < grid->size(); ++p) {
    const double x = u.coordinate(p, 0), y = u.coordinate(p, 1);
    const double cz = n == 3 ? std::cos(u.coordinate(p, 2)) : 1.0;
    u.samples()(p, 0) = spec.amplitude * std::sin(x) * std::cos(y) * cz;
    u.samples()(p, 1) = -spec.amplitude * std::cos(x) * std::sin(y) * cz;
    // shear-aligned stress with the same wavenumbers
    tau.samples()(p, sym_index(0, 1, n)) = spec.stress_amplitude * std::cos(x) * std::cos(y) * cz;
  }
  return State(0.0, leray_project(transform(u)), transform(tau));
}

State from_file(const InitialDataSpec& spec, GridPtr grid) {
  SnapshotContents c = read_snapshot(spec.file);
  if (c.fields.size() != 2 || c.fields[0].rank() != Rank::Vector || c.fields[1].rank() != Rank::SymTensor)
    throw ConfigError("initial snapshot must hold a vector record followed by a sym-tensor record");
  if (!(c.fields[0].grid() == *grid)) throw ConfigError("initial snapshot grid does not match the configuration");
  Field u(grid, Rank::Vector, c.fields[0].coeffs());
  Field tau(grid, Rank::SymTensor, c.fields[1].coeffs());
  return State(0.0, dealias(leray_project(u)), dealias(tau));
}

}  // namespace

State make_initial_data(const InitialDataSpec& spec, GridPtr grid) {
  switch (spec.kind) {
    case InitialKind::RandomBand: return random_band(spec, grid);
    case InitialKind::Oscillating: return oscillating(spec, grid);
    case InitialKind::TaylorGreen: return taylor_green(spec, grid);
    case InitialKind::File: return from_file(spec, grid);
  }
  throw ConfigError("unknown initial data kind");
}

}  // namespace oldb
