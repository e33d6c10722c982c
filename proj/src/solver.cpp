#include "oldb/solver.hpp"

#include <cmath>

namespace oldb {

namespace {

bool all_finite(const Field& f) { return f.coeffs().allFinite(); }

int checked_ratio(double num, double den, const char* what) {
  const double q = num / den;
  const double r = std::round(q);
  if (r < 1 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
    throw ConfigError(std::string(what) + " must be a positive integer multiple of dt");
  return static_cast<int>(r);
}

}  // namespace

void SimConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  if (points < 8 || points % 2) throw ConfigError("points per axis must be even and >= 8");
  physics.validate();
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(t_end >= 0)) throw ConfigError("t_end must be nonnegative");
  if (!(output_interval > 0)) throw ConfigError("output interval must be positive");
  if (!(lebesgue_p >= 1)) throw ConfigError("lebesgue_p must be >= 1");
  if (!(cfl > 0)) throw ConfigError("cfl must be positive");
  if (t_end > 0) total_steps();
  steps_per_output();
}

int SimConfig::total_steps() const {
  if (t_end == 0) return 0;
  return checked_ratio(t_end, dt, "t_end");
}

int SimConfig::steps_per_output() const { return checked_ratio(output_interval, dt, "output interval"); }

EffectiveVariables effective_variables(const State& state) {
  const Field gamma = lambda_power(leray_project(divergence(state.tau)), -1.0);
  Field w = lambda_power(gamma, 1.0) - state.u;
  Field g = state.u - lambda_power(gamma, -1.0);
  return {gamma, std::move(w), std::move(g)};
}

Rates nonlinear_rhs(const State& s, const ConstitutiveParams& p, bool nonlinear) {
  Field du = divergence(s.tau) * p.K1;
  Field dtau = symmetric_gradient(s.u) * p.K2;
  if (nonlinear) {
    du -= advect(s.u, s.u);
    dtau -= advect(s.u, s.tau);
    dtau -= bilinear_F(s.tau, s.u, p.b);
  }
  du = leray_project(du) + laplacian(s.u) * p.mu;
  if (!all_finite(du) || !all_finite(dtau)) throw BlowUpError(s.time, "non-finite rates");
  return {std::move(du), std::move(dtau)};
}

Integrator::Integrator(GridPtr grid, ConstitutiveParams params, double dt, bool nonlinear, double cfl)
    : grid_(std::move(grid)), params_(params), dt_(dt), nonlinear_(nonlinear), cfl_(cfl) {
  params_.validate();
  if (!(dt > 0)) throw StepSizeError("dt must be positive");
  factor_ = (-params_.mu * dt_ * grid_->norm_sq()).exp();
}

Field Integrator::viscous(const Field& u) const {
  Field out = u;
  for (int c = 0; c < out.components(); ++c) out.component(c).array() *= factor_.cast<std::complex<double>>();
  return out;
}

Rates Integrator::explicit_rates(const State& s) const {
  Rates r = nonlinear_rhs(s, params_, nonlinear_);
  r.du -= laplacian(s.u) * params_.mu;
  return r;
}

double Integrator::cfl_limit(const State& s) const {
  const double umax = pointwise_magnitude(inverse_transform(s.u)).maxCoeff();
  if (umax == 0) return std::numeric_limits<double>::infinity();
  return cfl_ * grid_->spacing() / umax;
}

State Integrator::step(const State& s) const {
  require_same_grid(s.grid(), *grid_);
  const double limit = cfl_limit(s);
  if (dt_ > limit)
    throw StepSizeError("dt = " + std::to_string(dt_) + " exceeds the advective limit " + std::to_string(limit) +
                        " at t = " + std::to_string(s.time));
  const Rates k1 = explicit_rates(s);
  State mid(s.time + dt_, viscous(s.u + k1.du * dt_), s.tau + k1.dtau * dt_);
  const Rates k2 = explicit_rates(mid);
  State next(s.time + dt_, viscous(s.u + k1.du * (dt_ / 2)) + k2.du * (dt_ / 2),
             s.tau + (k1.dtau + k2.dtau) * (dt_ / 2));
  next.u = dealias(leray_project(next.u));
  next.tau = dealias(std::move(next.tau));
  if (!all_finite(next.u) || !all_finite(next.tau)) throw BlowUpError(next.time, "non-finite state");
  return next;
}

State step(const State& state, const ConstitutiveParams& params, double dt, bool nonlinear) {
  return Integrator(state.grid_ptr(), params, dt, nonlinear).step(state);
}

SnapshotRecord measure(const State& s, const DyadicPartition& P, double p, double b) {
  SnapshotRecord rec;
  rec.time = s.time;
  const Field gamma = effective_variables(s).gamma;
  rec.u_l2 = block_norms(s.u, P, 2.0);
  rec.tau_l2 = block_norms(s.tau, P, 2.0);
  rec.gamma_l2 = block_norms(gamma, P, 2.0);
  if (p == 2.0) {
    rec.u_lp = rec.u_l2;
    rec.tau_lp = rec.tau_l2;
    rec.gamma_lp = rec.gamma_l2;
  } else {
    rec.u_lp = block_norms(s.u, P, p);
    rec.tau_lp = block_norms(s.tau, P, p);
    rec.gamma_lp = block_norms(gamma, P, p);
  }
  rec.divergence = divergence_residual(s.u);
  rec.imaginary = std::max(imaginary_residual(s.u), imaginary_residual(s.tau));
  rec.max_velocity = pointwise_magnitude(inverse_transform(s.u)).maxCoeff();

  const PhysicalField F = inverse_transform(bilinear_F_full(s.tau, s.u, b));
  const int n = s.grid().dim();
  double asym = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      asym = std::max(asym, (F.samples().col(tensor_index(i, j, n)) - F.samples().col(tensor_index(j, i, n)))
                                .cwiseAbs()
                                .maxCoeff());
  const double mag = F.samples().cwiseAbs().maxCoeff();
  rec.symmetry = mag > 0 ? asym / mag : 0.0;
  return rec;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.time);
  return t;
}

Trajectory simulate(const SimConfig& config) {
  config.validate();
  auto grid = make_grid(config.dim, config.points);
  return simulate(config, make_initial_data(config.initial, grid));
}

Trajectory simulate(const SimConfig& config, const State& initial) {
  config.validate();
  if (initial.grid().dim() != config.dim || initial.grid().points() != config.points)
    throw ConfigError("initial state grid does not match the configuration");
  Trajectory traj;
  traj.config = config;
  traj.partition = std::make_shared<const DyadicPartition>(initial.grid_ptr(), config.split);
  const Integrator integrator(initial.grid_ptr(), config.physics, config.dt, config.nonlinear, config.cfl);

  const int total = config.total_steps();
  const int every = config.steps_per_output();
  auto record = [&](const State& s) {
    traj.records.push_back(measure(s, *traj.partition, config.lebesgue_p, config.physics.b));
    if (config.keep_states) traj.states.push_back(s);
  };

  State state = initial;
  state.time = 0.0;
  record(state);
  try {
    for (int n = 1; n <= total; ++n) {
      state = integrator.step(state);
      state.time = n * config.dt;  // avoid drift from repeated addition
      if (n % every == 0 || n == total) record(state);
    }
  } catch (const BlowUpError& e) {
    traj.blew_up = true;
    traj.blow_up_time = e.time();
    traj.blow_up_message = e.what();
  }
  return traj;
}

}  // namespace oldb
