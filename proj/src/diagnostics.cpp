#include "oldb/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <ostream>
#include <thread>

#include <Eigen/QR>

#include "oldb/io.hpp"
#include "oldb/random_fields.hpp"

namespace oldb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// A block below this fraction of its field's norm is roundoff and counts as empty.
constexpr double kEmptyBlock = 1e-13;

}  // namespace

// ---------------------------------------------------------------------------
// NormSeries

NormSeries::NormSeries(std::vector<double> times) : times_(std::move(times)) {}

void NormSeries::add_channel(std::string name, std::vector<double> values) {
  if (values.size() != times_.size()) throw DimensionError("channel '" + name + "' length differs from times");
  for (const auto& n : names_)
    if (n == name) throw ParameterError("duplicate channel '" + name + "'");
  names_.push_back(std::move(name));
  values_.push_back(std::move(values));
}

void NormSeries::add_comment(std::string key, std::string value) {
  comments_.emplace_back(std::move(key), std::move(value));
}

const std::vector<double>& NormSeries::channel(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return values_[i];
  throw ParameterError("no channel named '" + name + "'");
}

void NormSeries::validate() const {
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw PreconditionError("norm series times are not strictly increasing");
  for (std::size_t c = 0; c < names_.size(); ++c)
    for (double v : values_[c])
      if (!std::isfinite(v) || v < 0) throw PreconditionError("channel '" + names_[c] + "' has a negative or non-finite value");
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void NormSeries::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : comments_) out << "# " << k << '=' << v << '\n';
  out << "time";
  for (const auto& n : names_) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out << format_number(times_[i]);
    for (const auto& col : values_) out << ',' << format_number(col[i]);
    out << '\n';
  }
}

void NormSeries::write_csv(const std::filesystem::path& path) const {
  atomic_write(path, [&](std::ostream& out) { write_csv(out); });
}

std::string channel_name(const BesovSpec& spec, FrequencyRange range, bool time_norm) {
  char s[32];
  std::snprintf(s, sizeof s, "%.1f", spec.s);
  std::string p = std::isinf(spec.p) ? "inf" : format_number(spec.p);
  std::string name = "B_" + p + "_1_s" + s;
  switch (range) {
    case FrequencyRange::All: break;
    case FrequencyRange::Low: name += "_low"; break;
    case FrequencyRange::High: name += "_high"; break;
  }
  if (time_norm) name = (std::isinf(spec.q) ? std::string("Linf_") : "L" + format_number(spec.q) + "_") + name;
  return name;
}

// ---------------------------------------------------------------------------
// Exact identities

namespace detail {

double cancellation_pairing(const Field& u, const Field& tau, const DyadicPartition& P, int j) {
  const Field uj = dyadic_block(u, P, j);
  const Field tj = dyadic_block(tau, P, j);
  const double nu = l2_norm(uj), nt = l2_norm(tj);
  if (nu <= kEmptyBlock * l2_norm(u) || nt <= kEmptyBlock * l2_norm(tau)) return 0.0;
  const Field pdiv = leray_project(divergence(tj));
  // ⟨D(u), τ⟩ in full storage so a non-symmetric τ is paired entrywise
  const Field grad = gradient(uj);
  const Field tfull = to_full_tensor(tj);
  const int n = u.dim();
  double dtau = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto dab = (grad.component(tensor_index(a, b, n)) + grad.component(tensor_index(b, a, n))) * 0.5;
      dtau += (dab.array() * tfull.component(tensor_index(a, b, n)).array().conjugate()).real().sum();
    }
  dtau *= u.grid().volume();
  return std::abs(inner_product(pdiv, uj) + dtau) / (nu * nt);
}

double transport_pairing(const Field& u, const Field& z, const DyadicPartition& P, int j) {
  const Field zj = dyadic_block(z, P, j);
  const double nz = l2_norm(zj);
  const double umax = pointwise_magnitude(inverse_transform(u)).maxCoeff();
  if (nz <= kEmptyBlock * l2_norm(z) || umax == 0) return 0.0;
  return std::abs(inner_product(advect(u, zj), zj)) / (umax * nz * nz);
}

}  // namespace detail

double cancellation_residual(const State& s, const DyadicPartition& P, int j) {
  if (divergence_residual(s.u) > 1e-10) throw PreconditionError("cancellation identity needs div u = 0");
  if (s.tau.rank() != Rank::SymTensor) throw PreconditionError("cancellation identity needs a symmetric stress");
  return detail::cancellation_pairing(s.u, s.tau, P, j);
}

TransportTarget parse_transport_target(const std::string& name) {
  if (name == "u") return TransportTarget::Velocity;
  if (name == "tau") return TransportTarget::Stress;
  if (name == "gamma") return TransportTarget::Gamma;
  if (name == "w") return TransportTarget::W;
  throw ParameterError("unknown transport target '" + name + "'");
}

const char* to_string(TransportTarget t) {
  switch (t) {
    case TransportTarget::Velocity: return "u";
    case TransportTarget::Stress: return "tau";
    case TransportTarget::Gamma: return "gamma";
    case TransportTarget::W: return "w";
  }
  return "unknown";
}

double transport_residual(const State& s, const DyadicPartition& P, int j, TransportTarget target) {
  if (divergence_residual(s.u) > 1e-10) throw PreconditionError("transport identity needs div u = 0");
  switch (target) {
    case TransportTarget::Velocity: return detail::transport_pairing(s.u, s.u, P, j);
    case TransportTarget::Stress: return detail::transport_pairing(s.u, s.tau, P, j);
    case TransportTarget::Gamma: return detail::transport_pairing(s.u, effective_variables(s).gamma, P, j);
    case TransportTarget::W: return detail::transport_pairing(s.u, effective_variables(s).w, P, j);
  }
  throw ParameterError("unknown transport target");
}

std::vector<IdentityCheck> identity_suite(const State& s, const DyadicPartition& P) {
  std::vector<IdentityCheck> rows;
  const double un = l2_norm(s.u);
  rows.push_back({"divergence", un > 0 ? divergence_residual(s.u) / un : 0.0, 1e-10});
  double canc = 0;
  std::array<double, 4> trans{};
  const EffectiveVariables ev = effective_variables(s);
  const Field* targets[] = {&s.u, &s.tau, &ev.gamma, &ev.w};
  for (int j = P.j_min(); j <= P.j_max(); ++j) {
    canc = std::max(canc, cancellation_residual(s, P, j));
    for (int t = 0; t < 4; ++t) trans[t] = std::max(trans[t], detail::transport_pairing(s.u, *targets[t], P, j));
  }
  rows.push_back({"cancellation", canc, 1e-10});
  for (int t = 0; t < 4; ++t)
    rows.push_back({std::string("transport_") + to_string(static_cast<TransportTarget>(t)), trans[t], 1e-10});
  const double gn = l2_norm(ev.gamma);
  rows.push_back({"gamma_projector_range", gn > 0 ? l2_norm(leray_project(ev.gamma) - ev.gamma) / gn : 0.0, 1e-11});
  // Λ𝒢 = Λu − Γ
  const Field lhs = lambda_power(ev.g, 1.0);
  const Field rhs = lambda_power(s.u, 1.0) - ev.gamma;
  const double scale = std::max(l2_norm(rhs), l2_norm(lambda_power(s.u, 1.0)));
  rows.push_back({"effective_consistency", scale > 0 ? l2_norm(lhs - rhs) / scale : 0.0, 1e-11});
  rows.push_back({"partition_of_unity", P.partition_of_unity_error(), 1e-10});
  Field sum = s.u.zeros_like();
  for (int j = P.j_min(); j <= P.j_max(); ++j) sum += dyadic_block(s.u, P, j);
  const Field mean_free = remove_mean(s.u);
  const double mn = l2_norm(mean_free);
  rows.push_back({"reconstruction", mn > 0 ? l2_norm(sum - mean_free) / mn : 0.0, 1e-9});
  return rows;
}

// ---------------------------------------------------------------------------
// Block energy ledger

namespace {

struct BlockTerms {
  double energy, viscous, coupling, commutator, constitutive, grad_sq, l2_sq;
};

BlockTerms block_terms(const State& s, const DyadicPartition& P, int j, const ConstitutiveParams& prm,
                       bool nonlinear) {
  BlockTerms t{};
  const Field uj = dyadic_block(s.u, P, j);
  const Field tj = dyadic_block(s.tau, P, j);
  const double nu = l2_norm(uj), nt = l2_norm(tj);
  t.l2_sq = nu * nu;
  t.energy = 0.5 * (nu * nu + nt * nt);
  t.grad_sq = l2_norm(gradient(uj));
  t.grad_sq *= t.grad_sq;
  t.viscous = -prm.mu * t.grad_sq;
  t.coupling = prm.K1 * inner_product(leray_project(divergence(tj)), uj) +
               prm.K2 * inner_product(symmetric_gradient(uj), tj);
  if (nonlinear) {
    // −⟨Δ̇_j(u·∇z), Δ̇_j z⟩ = ⟨[u·∇, Δ̇_j]z, Δ̇_j z⟩ since ⟨u·∇Δ̇_j z, Δ̇_j z⟩ = 0
    const Field cu = advect(s.u, uj) - dyadic_block(advect(s.u, s.u), P, j);
    const Field ct = advect(s.u, tj) - dyadic_block(advect(s.u, s.tau), P, j);
    t.commutator = inner_product(cu, uj) + inner_product(ct, tj);
    t.constitutive = -inner_product(dyadic_block(bilinear_F(s.tau, s.u, prm.b), P, j), tj);
  }
  return t;
}

}  // namespace

EnergyLedger block_energy_balance(const Trajectory& traj, int j) {
  const auto& P = *traj.partition;
  if (!P.contains(j)) throw ParameterError("block index out of range");
  if (traj.states.size() < 3) throw PreconditionError("energy ledger needs at least three stored states");
  const auto& cfg = traj.config;
  std::vector<BlockTerms> terms;
  terms.reserve(traj.states.size());
  for (const auto& s : traj.states) terms.push_back(block_terms(s, P, j, cfg.physics, cfg.nonlinear));

  EnergyLedger ledger;
  ledger.block = j;
  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const BlockTerms& t = terms[i];
    EnergyLedgerRow row;
    row.time = traj.states[i].time;
    row.energy = t.energy;
    const double h = traj.states[i + 1].time - traj.states[i - 1].time;
    row.derivative_fd = (terms[i + 1].energy - terms[i - 1].energy) / h;
    row.viscous = t.viscous;
    row.coupling = t.coupling;
    row.commutator = t.commutator;
    row.constitutive = t.constitutive;
    const auto sum = [](const BlockTerms& b) { return b.viscous + b.coupling + b.commutator + b.constitutive; };
    row.residual = row.derivative_fd - sum(t);
    const double scale = std::abs(t.viscous) + std::abs(t.coupling) + std::abs(t.commutator) +
                         std::abs(t.constitutive) + std::abs(row.derivative_fd);
    row.relative_residual = scale > 0 ? std::abs(row.residual) / scale : 0.0;
    row.bernstein_c1 = t.l2_sq > 0 ? t.grad_sq / (std::exp2(2.0 * j) * t.l2_sq) : kNaN;
    // centered-difference truncation ≈ h²E'''/24 with h the full stencil width
    const double curvature = std::abs(sum(terms[i + 1]) - 2 * sum(t) + sum(terms[i - 1]));
    row.cadence_warning = scale > 0 && curvature / 6 > 1e-4 * scale;
    ledger.cadence_warning = ledger.cadence_warning || row.cadence_warning;
    ledger.max_relative_residual = std::max(ledger.max_relative_residual, row.relative_residual);
    ledger.rows.push_back(row);
  }
  return ledger;
}

// ---------------------------------------------------------------------------
// Channel histories shared by X(t) and the estimate chain

namespace {

struct Histories {
  std::vector<double> times;
  Eigen::ArrayXXd u2, t2, g2, up, tp, gp;  // rows: snapshots, cols: blocks
};

Histories collect(const Trajectory& traj) {
  Histories h;
  const std::size_t T = traj.records.size();
  const int B = traj.partition->block_count();
  for (auto* m : {&h.u2, &h.t2, &h.g2, &h.up, &h.tp, &h.gp}) m->resize(T, B);
  for (std::size_t k = 0; k < T; ++k) {
    const auto& r = traj.records[k];
    h.times.push_back(r.time);
    h.u2.row(k) = r.u_l2.transpose();
    h.t2.row(k) = r.tau_l2.transpose();
    h.g2.row(k) = r.gamma_l2.transpose();
    h.up.row(k) = r.u_lp.transpose();
    h.tp.row(k) = r.tau_lp.transpose();
    h.gp.row(k) = r.gamma_lp.transpose();
  }
  return h;
}

// Σ_{j in range} 2^{js} row_j for the split `split`.
double weighted(const Eigen::ArrayXd& row, const DyadicPartition& P, double s, bool low, int split) {
  double sum = 0;
  for (int j = P.j_min(); j <= P.j_max(); ++j)
    if ((j <= split) == low) sum += std::exp2(j * s) * row(j - P.j_min());
  return sum;
}

// Per block running sup over time.
Eigen::ArrayXXd running_max(const Eigen::ArrayXXd& h) {
  Eigen::ArrayXXd out = h;
  for (Index k = 1; k < h.rows(); ++k) out.row(k) = out.row(k).max(out.row(k - 1));
  return out;
}

// Per block cumulative trapezoid integral.
Eigen::ArrayXXd running_integral(const std::vector<double>& t, const Eigen::ArrayXXd& h) {
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(h.rows(), h.cols());
  for (Index k = 1; k < h.rows(); ++k) out.row(k) = out.row(k - 1) + 0.5 * (t[k] - t[k - 1]) * (h.row(k) + h.row(k - 1));
  return out;
}

// Cumulative trapezoid of a scalar series.
std::vector<double> cumulative(const std::vector<double>& t, const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return out;
}

std::vector<double> series(const Eigen::ArrayXXd& h, const DyadicPartition& P, double s, bool low, int split) {
  std::vector<double> out(h.rows());
  for (Index k = 0; k < h.rows(); ++k) out[k] = weighted(h.row(k).transpose(), P, s, low, split);
  return out;
}

void require_p(const Trajectory& traj, double p) {
  if (!(p >= 2.0 && p < 4.0)) throw ParameterError("p must satisfy 2 <= p < 4");
  if (p != traj.config.lebesgue_p)
    throw ParameterError("trajectory channels were recorded at p = " + format_number(traj.config.lebesgue_p));
  if (traj.records.empty()) throw PreconditionError("trajectory has no records");
}

}  // namespace

XFunctional hybrid_functional(const Trajectory& traj, double p, std::optional<int> split) {
  require_p(traj, p);
  const auto& P = *traj.partition;
  const int j0 = split.value_or(P.split());
  const Histories h = collect(traj);
  const double n = traj.config.dim;
  const double lo_sup = n / 2 - 1, lo_int = n / 2 + 1;

  XFunctional x;
  x.p = p;
  x.split = j0;
  x.times = h.times;
  x.components[0] = series(running_max(h.u2 + h.t2), P, lo_sup, true, j0);
  x.components[1] = series(running_integral(h.times, h.u2), P, lo_int, true, j0);
  x.components[2] = series(running_integral(h.times, h.g2), P, lo_int, true, j0);
  x.components[3] = series(running_max(h.up), P, n / p - 1, false, j0);
  x.components[4] = series(running_max(h.tp), P, n / p, false, j0);
  x.components[5] = series(running_integral(h.times, h.gp), P, n / p, false, j0);
  x.components[6] = series(running_integral(h.times, h.up), P, n / p + 1, false, j0);

  const std::size_t T = h.times.size();
  x.total.assign(T, 0.0);
  for (const auto& c : x.components)
    for (std::size_t k = 0; k < T; ++k) x.total[k] += c[k];
  for (const auto& c : x.components)
    for (std::size_t k = 1; k < T; ++k)
      if (c[k] < c[k - 1]) x.monotone = false;
  x.ratio.resize(T);
  for (std::size_t k = 0; k < T; ++k) x.ratio[k] = x.total[0] > 0 ? x.total[k] / x.total[0] : kNaN;
  return x;
}

NormSeries XFunctional::as_series() const {
  NormSeries s(times);
  for (std::size_t i = 0; i < components.size(); ++i) s.add_channel(kNames[i], components[i]);
  s.add_channel("X", total);
  s.add_channel("X_over_X0", ratio);
  s.add_comment("p", format_number(p));
  s.add_comment("j0", std::to_string(split));
  return s;
}

// ---------------------------------------------------------------------------
// Scaling law

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("fit inputs differ in length");
  if (x.size() < 4) throw ParameterError("power-law fit needs at least 4 points");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (!(*mn > 0) || std::log2(*mx / *mn) < 3.0 - 1e-12)
    throw ParameterError("power-law fit needs positive abscissae spanning at least 3 octaves");
  const std::size_t m = x.size();
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(y[i] > 0)) throw DegenerateInputError("power-law fit needs positive ordinates");
    A(i, 0) = std::log(x[i]);
    A(i, 1) = 1.0;
    b(i) = std::log(y[i]);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  PowerLawFit fit;
  fit.x = x;
  fit.y = y;
  fit.slope = c(0);
  fit.intercept = c(1);
  fit.residual = std::sqrt((A * c - b).squaredNorm() / m);
  return fit;
}

double oscillating_data_norm(const ScalingSetup& setup, double epsilon) {
  auto grid = make_grid(setup.dim, setup.points);
  InitialDataSpec spec;
  spec.kind = InitialKind::Oscillating;
  spec.epsilon = epsilon;
  spec.envelope_width = setup.envelope_width;
  spec.amplitude = setup.amplitude;
  const State s = make_initial_data(spec, grid);
  const DyadicPartition P(grid, setup.split);
  const double n = setup.dim;
  return besov_norm(s.u, P, {n / 2 - 1, 2.0}, FrequencyRange::Low) +
         besov_norm(s.u, P, {n / setup.p - 1, setup.p}, FrequencyRange::High);
}

PowerLawFit scaling_fit(const ScalingSetup& setup, const std::vector<double>& epsilons, int threads) {
  if (epsilons.size() < 4) throw ParameterError("scaling fit needs at least 4 values of epsilon");
  std::vector<double> norms(epsilons.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(epsilons.size())));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < epsilons.size(); i += workers) norms[i] = oscillating_data_norm(setup, epsilons[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return fit_power_law(epsilons, norms);
}

// ---------------------------------------------------------------------------
// Estimate chain

ChainReport estimate_chain_monitor(const Trajectory& traj) {
  if (traj.records.empty()) throw PreconditionError("trajectory has no records");
  const auto& P = *traj.partition;
  const int j0 = P.split();
  const double p = traj.config.lebesgue_p;
  const double n = traj.config.dim;
  const Histories h = collect(traj);
  const auto& t = h.times;
  const std::size_t T = t.size();

  // instantaneous channels
  const auto ul = series(h.u2, P, n / 2 - 1, true, j0);
  const auto tl = series(h.t2, P, n / 2 - 1, true, j0);
  const auto uh = series(h.up, P, n / p - 1, false, j0);
  const auto th = series(h.tp, P, n / p, false, j0);
  const auto ul_diss = series(h.u2, P, n / 2 + 1, true, j0);
  const auto uh_diss = series(h.up, P, n / p + 1, false, j0);
  const auto gl_diss = series(h.g2, P, n / 2 + 1, true, j0);
  const auto gh_diss = series(h.gp, P, n / p, false, j0);
  const auto gl = series(h.g2, P, n / 2 - 1, true, j0);

  std::vector<double> s1_integrand(T), s2_integrand(T);
  for (std::size_t k = 0; k < T; ++k) {
    s1_integrand[k] = (ul[k] + tl[k] + uh[k] + th[k]) * (ul_diss[k] + uh_diss[k]);
    s2_integrand[k] = (tl[k] + th[k]) * (gl_diss[k] + gh_diss[k]);
  }
  const auto S1 = cumulative(t, s1_integrand);
  const auto S2 = cumulative(t, s2_integrand);

  const auto pair_sup = series(running_max(h.u2 + h.t2), P, n / 2 - 1, true, j0);
  const auto ug_sup = series(running_max(h.u2 + h.g2), P, n / 2 - 1, true, j0);
  const auto ug_int = series(running_integral(t, h.u2 + h.g2), P, n / 2 + 1, true, j0);
  const auto tau_low_sup = series(running_max(h.t2), P, n / 2, true, j0);
  const auto ul_int = series(running_integral(t, h.u2), P, n / 2 + 1, true, j0);
  const auto gl_int = series(running_integral(t, h.g2), P, n / 2 + 1, true, j0);
  const auto uh_sup = series(running_max(h.up), P, n / p - 1, false, j0);
  const auto th_sup = series(running_max(h.tp), P, n / p, false, j0);
  const auto gh_int = series(running_integral(t, h.gp), P, n / p, false, j0);
  const auto uh_int = series(running_integral(t, h.up), P, n / p + 1, false, j0);

  const double low0 = ul[0] + tl[0];
  const double ug0 = ul[0] + gl[0];
  const double I0 = low0 + uh[0] + th[0];

  ChainReport report;
  report.times = t;
  auto add = [&](std::string name, auto&& lhs_at, auto&& rhs_at) {
    ChainInequality q;
    q.name = std::move(name);
    q.sup_ratio = kNaN;
    for (std::size_t k = 0; k < T; ++k) {
      const double l = lhs_at(k), r = rhs_at(k);
      q.lhs.push_back(l);
      q.rhs.push_back(r);
      const double ratio = r > 0 ? l / r : (l > 0 ? std::numeric_limits<double>::infinity() : kNaN);
      q.ratio.push_back(ratio);
      if (!std::isnan(ratio)) q.sup_ratio = std::isnan(q.sup_ratio) ? ratio : std::max(q.sup_ratio, ratio);
    }
    // late quarter against the rest
    double early = 0, late = 0;
    const std::size_t cut = T - T / 4;
    for (std::size_t k = 0; k < T; ++k) {
      if (std::isnan(q.ratio[k])) continue;
      (k < cut ? early : late) = std::max(k < cut ? early : late, q.ratio[k]);
    }
    q.growing = T >= 8 && late > 1.5 * early;
    report.inequalities.push_back(std::move(q));
  };

  const auto X = [&](std::size_t k) {
    return pair_sup[k] + ul_int[k] + gl_int[k] + uh_sup[k] + th_sup[k] + gh_int[k] + uh_int[k];
  };
  add("low_energy", [&](std::size_t k) { return pair_sup[k]; }, [&](std::size_t k) { return low0 + S1[k]; });
  add("low_effective", [&](std::size_t k) { return ug_sup[k] + ug_int[k]; },
      [&](std::size_t k) { return ug0 + S1[k]; });
  add("low_combined", [&](std::size_t k) { return pair_sup[k] + tau_low_sup[k] + ul_int[k] + gl_int[k]; },
      [&](std::size_t k) { return low0 + S1[k]; });
  add("high_combined", [&](std::size_t k) { return uh_sup[k] + th_sup[k] + gh_int[k] + uh_int[k]; },
      [&](std::size_t k) { return uh[0] + th[0] + S1[k] + S2[k]; });
  add("hybrid", X, [&](std::size_t k) { return I0 + S1[k] + S2[k]; });
  add("bootstrap", X, [&](std::size_t k) { return std::exp(X(k)) * I0; });
  return report;
}

NormSeries ChainReport::as_series() const {
  NormSeries s(times);
  for (const auto& q : inequalities) {
    s.add_channel(q.name + "_lhs", q.lhs);
    s.add_channel(q.name + "_rhs", q.rhs);
  }
  return s;
}

}  // namespace oldb

// ---------------------------------------------------------------------------
// Lemma constants

namespace oldb {

const LemmaConstant& LemmaStudy::operator[](const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return c;
  throw ParameterError("no lemma constant named '" + name + "'");
}

NormSeries LemmaStudy::as_series() const {
  std::vector<double> index, value;
  for (std::size_t i = 0; i < constants.size(); ++i) {
    index.push_back(static_cast<double>(i));
    value.push_back(constants[i].max_ratio);
  }
  NormSeries s(index);
  s.add_channel("max_ratio", value);
  s.add_comment("seed", std::to_string(seed));
  s.add_comment("draws", std::to_string(draws));
  s.add_comment("points", std::to_string(points));
  for (std::size_t i = 0; i < constants.size(); ++i) s.add_comment("row" + std::to_string(i), constants[i].name);
  return s;
}

LemmaStudy lemma_constants(int dim, int points, int draws, std::uint64_t seed, double p) {
  if (draws < 1) throw ParameterError("draws must be positive");
  auto grid = make_grid(dim, points);
  const DyadicPartition P(grid);
  // bands: velocity and transported field up to |ξ| = 12, annulus 3..10 around λ = 4, ball of radius 8
  constexpr double kBand = 12, kLambda = 4, kBall = 8;
  if (grid->retained_max() < kBand) throw ConfigError("lemma study needs at least 64 points per axis");

  LemmaStudy study;
  study.dim = dim;
  study.points = points;
  study.draws = draws;
  study.seed = seed;
  study.p = p;
  const std::vector<std::string> names = {
      "bernstein_gradient",     "bernstein_reverse",      "bernstein_embedding", "product_law",
      "product_law_general",    "commutator_block",       "commutator_low",      "commutator_low_projector_inside",
      "commutator_low_projector_outside"};
  for (const auto& n : names) study.constants.push_back({n, 0.0, true});

  InequalityInputs in;
  in.p = p;
  in.q = 2.0;
  in.s1 = 0.5;
  in.s2 = 0.5;
  in.s = 0.0;
  for (int k = 0; k < draws; ++k) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
    const Field u = random_solenoidal_field(grid, 1, kBand, rng, 1.0);
    const Field v = random_band_field(grid, Rank::Vector, 1, kBand, rng, 1.0);
    const Field w = random_band_field(grid, Rank::Scalar, 1, kBand, rng, 1.0);
    const Field w2 = random_band_field(grid, Rank::Scalar, 1, kBand, rng, 1.0);
    const Field annulus = random_band_field(grid, Rank::Scalar, 0.75 * kLambda, 2.5 * kLambda, rng);
    const Field ball = random_band_field(grid, Rank::Scalar, 1, kBall, rng);

    const double grad = gradient_bernstein_ratio(annulus, p, kLambda);
    const double lower = lp_norm(gradient(annulus), p) / (kLambda * lp_norm(annulus, p));
    const std::array<int, 3> zero{0, 0, 0};
    const double values[] = {
        grad,
        1.0 / lower,
        bernstein_ratio(ball, std::span<const int>(zero.data(), dim), 2.0, INFINITY, kBall),
        inequality_ratio(InequalityKind::ProductLaw, w, multiply(w, w), P, in),
        inequality_ratio(InequalityKind::ProductLawGeneral, w, w2, P, in),
        inequality_ratio(InequalityKind::CommutatorBlock, u, v, P, in),
        commutator_lowfreq_ratio(u, v, P, p, ZeroOrderMultiplier::None),
        commutator_lowfreq_ratio(u, v, P, p, ZeroOrderMultiplier::ProjectorInside),
        commutator_lowfreq_ratio(u, v, P, p, ZeroOrderMultiplier::ProjectorOutside),
    };
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto& c = study.constants[i];
      if (!std::isfinite(values[i])) c.all_finite = false;
      else c.max_ratio = std::max(c.max_ratio, values[i]);
    }
  }
  return study;
}

}  // namespace oldb
