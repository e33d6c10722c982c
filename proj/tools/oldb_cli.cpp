// oldb: command-line front end.
//
//   oldb simulate --config run.ini [--set section.key=value]... [--seed N] --out DIR
//   oldb xfun     --config run.ini [--set ...] [--seed N] [--p P] [--j0 J] --out FILE
//   oldb modes    --r-min A --r-max B --points M [--log] [--physical K1,K2,mu] [--out FILE]
//   oldb verify   --snapshot FILE [--j0 J]
//   oldb scaling  [--eps E]... [--points N] [--p P] [--j0 J] [--width W] [--out FILE]
//   oldb besov    --snapshot FILE --field u|tau|gamma --s S --p P [--range all|low|high]
//   oldb besov    --lemmas [--points N] [--draws K] [--seed N] [--out FILE]
//
// Exit status: 0 success, 1 identity check failed or internal error,
// 2 invalid input, 3 blow-up (artifacts written and flagged).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "oldb/config.hpp"
#include "oldb/diagnostics.hpp"
#include "oldb/io.hpp"
#include "oldb/linear_modes.hpp"

namespace fs = std::filesystem;
using namespace oldb;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBlowUp = 3;

void emit_error(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"code", code}, {"message", message}}.dump() << std::endl;
}

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OLDB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("OLDB_THREADS must be a positive integer");
    n = static_cast<int>(v);
  }
  return std::max(1, n);
}

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override, section.key=value")->take_all();
    app->add_option("--seed", seed, "seed for random initial data");
  }

  RunConfig load() const {
    std::vector<std::string> all = overrides;
    if (seed) all.push_back("initial.seed=" + std::to_string(*seed));
    return config.empty() ? parse_config("", all) : load_config(config, all);
  }
};

// Per-snapshot low/high Besov norms of u, τ, Γ and the invariant residuals.
NormSeries norm_series(const Trajectory& traj) {
  const auto& P = *traj.partition;
  const double n = traj.config.dim, p = traj.config.lebesgue_p;
  NormSeries s(traj.times());
  auto channel = [&](const std::string& field, auto member, double sp, double pp, FrequencyRange range) {
    std::vector<double> v;
    for (const auto& r : traj.records) v.push_back(besov_from_blocks(r.*member, P, sp, range));
    s.add_channel(field + "_" + channel_name({sp, pp}, range), std::move(v));
  };
  using R = SnapshotRecord;
  channel("u", &R::u_l2, n / 2 - 1, 2.0, FrequencyRange::Low);
  channel("u", &R::u_lp, n / p - 1, p, FrequencyRange::High);
  channel("tau", &R::tau_l2, n / 2 - 1, 2.0, FrequencyRange::Low);
  channel("tau", &R::tau_lp, n / p, p, FrequencyRange::High);
  channel("gamma", &R::gamma_l2, n / 2 + 1, 2.0, FrequencyRange::Low);
  channel("gamma", &R::gamma_lp, n / p, p, FrequencyRange::High);
  auto scalar = [&](const std::string& name, double R::*member) {
    std::vector<double> v;
    for (const auto& r : traj.records) v.push_back(r.*member);
    s.add_channel(name, std::move(v));
  };
  scalar("divergence", &R::divergence);
  scalar("symmetry", &R::symmetry);
  scalar("imaginary", &R::imaginary);
  scalar("max_velocity", &R::max_velocity);
  return s;
}

void tag(NormSeries& s, const RunConfig& rc, const Trajectory& traj) {
  s.add_comment("seed", std::to_string(rc.sim.initial.seed));
  if (traj.blew_up) s.add_comment("blow_up", format_number(traj.blow_up_time));
}

int run_simulate(const RunOptions& opts, const fs::path& out) {
  RunConfig rc = opts.load();
  rc.sim.keep_states = rc.write_snapshots;
  const Trajectory traj = simulate(rc.sim);
  fs::create_directories(out);
  atomic_write(out / "config.ini", [&](std::ostream& o) { o << to_ini(rc); });
  NormSeries norms = norm_series(traj);
  tag(norms, rc, traj);
  norms.write_csv(out / "norms.csv");
  NormSeries x = hybrid_functional(traj, rc.sim.lebesgue_p).as_series();
  tag(x, rc, traj);
  x.write_csv(out / "xfun.csv");
  NormSeries chain = estimate_chain_monitor(traj).as_series();
  tag(chain, rc, traj);
  chain.write_csv(out / "chain.csv");
  if (rc.write_snapshots && !traj.states.empty()) {
    const State& last = traj.states.back();
    const std::vector<Field> fields = {last.u, last.tau};
    write_snapshot(out / "final.oldb", fields, last.time);
  }
  if (traj.blew_up) {
    emit_error("blow_up", traj.blow_up_message);
    return kExitBlowUp;
  }
  return 0;
}

int run_xfun(const RunOptions& opts, std::optional<double> p, std::optional<int> j0, const std::string& out) {
  RunConfig rc = opts.load();
  if (p) rc.sim.lebesgue_p = *p;
  const Trajectory traj = simulate(rc.sim);
  NormSeries x = hybrid_functional(traj, rc.sim.lebesgue_p, j0).as_series();
  tag(x, rc, traj);
  if (out.empty()) x.write_csv(std::cout);
  else x.write_csv(fs::path(out));
  if (traj.blew_up) {
    emit_error("blow_up", traj.blow_up_message);
    return kExitBlowUp;
  }
  return 0;
}

void write_text(const std::string& out, const std::function<void(std::ostream&)>& writer) {
  if (out.empty()) writer(std::cout);
  else atomic_write(out, writer);
}

int run_modes(double r_min, double r_max, int points, bool log_spacing, const std::vector<double>& physical,
              const std::string& out) {
  if (!(r_min > 0) || !(r_max > r_min)) throw ParameterError("need 0 < r-min < r-max");
  if (points < 2) throw ParameterError("need at least 2 radii");
  SymbolCoefficients k = SymbolCoefficients::reference();
  if (!physical.empty()) {
    if (physical.size() != 3) throw ParameterError("--physical expects K1,K2,mu");
    ConstitutiveParams prm;
    prm.K1 = physical[0];
    prm.K2 = physical[1];
    prm.mu = physical[2];
    prm.validate();
    k = SymbolCoefficients::from_params(prm);
  }
  write_text(out, [&](std::ostream& o) {
    o << "r,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,regime\n";
    for (int i = 0; i < points; ++i) {
      const double f = static_cast<double>(i) / (points - 1);
      const double r = log_spacing ? r_min * std::pow(r_max / r_min, f) : r_min + f * (r_max - r_min);
      const auto m = eigenvalues(r, k);
      o << format_number(r) << ',' << format_number(m.lambda_plus.real()) << ','
        << format_number(m.lambda_plus.imag()) << ',' << format_number(m.lambda_minus.real()) << ','
        << format_number(m.lambda_minus.imag()) << ',' << to_string(m.regime) << '\n';
    }
  });
  return 0;
}

State load_state(const std::string& path) {
  SnapshotContents c = read_snapshot(path);
  if (c.fields.size() != 2 || c.fields[0].rank() != Rank::Vector || c.fields[1].rank() != Rank::SymTensor)
    throw ConfigError("snapshot must hold a vector record followed by a sym-tensor record");
  // the identities are exact for dealiased fields, which is what the solver stores
  return State(c.time, dealias(c.fields[0]), dealias(c.fields[1]));
}

int run_verify(const std::string& snapshot, int j0) {
  const State s = load_state(snapshot);
  const DyadicPartition P(s.grid_ptr(), j0);
  bool ok = true;
  std::cout << "check,value,tolerance,status\n";
  for (const auto& row : identity_suite(s, P)) {
    ok = ok && row.pass();
    std::cout << row.name << ',' << format_number(row.value) << ',' << format_number(row.tolerance) << ','
              << (row.pass() ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : kExitFailed;
}

int run_scaling(std::vector<double> eps, const ScalingSetup& setup, const std::string& out) {
  if (eps.empty()) eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  const PowerLawFit fit = scaling_fit(setup, eps, worker_threads());
  write_text(out, [&](std::ostream& o) {
    o << "# slope=" << format_number(fit.slope) << "\n# intercept=" << format_number(fit.intercept)
      << "\n# residual=" << format_number(fit.residual) << "\n# p=" << format_number(setup.p)
      << "\n# j0=" << setup.split << "\n";
    o << "eps,norm,fit\n";
    for (std::size_t i = 0; i < fit.x.size(); ++i)
      o << format_number(fit.x[i]) << ',' << format_number(fit.y[i]) << ','
        << format_number(std::exp(fit.intercept) * std::pow(fit.x[i], fit.slope)) << '\n';
  });
  return 0;
}

int run_besov(const std::string& snapshot, const std::string& field, double s, double p, const std::string& range,
              int j0, const std::string& out) {
  const State st = load_state(snapshot);
  const DyadicPartition P(st.grid_ptr(), j0);
  Field f = field == "u"       ? st.u
            : field == "tau"   ? st.tau
            : field == "gamma" ? effective_variables(st).gamma
                               : throw ParameterError("field must be u, tau or gamma");
  const FrequencyRange fr = range == "all"    ? FrequencyRange::All
                            : range == "low"  ? FrequencyRange::Low
                            : range == "high" ? FrequencyRange::High
                                              : throw ParameterError("range must be all, low or high");
  const Eigen::ArrayXd blocks = block_norms(f, P, p);
  write_text(out, [&](std::ostream& o) {
    o << "# " << field << '_' << channel_name({s, p}, fr) << '=' << format_number(besov_from_blocks(blocks, P, s, fr))
      << "\nj,block_norm,weighted\n";
    for (int j = P.j_min(); j <= P.j_max(); ++j) {
      const double b = blocks(j - P.j_min());
      o << j << ',' << format_number(b) << ',' << format_number(std::exp2(j * s) * b) << '\n';
    }
  });
  return 0;
}

int run_lemmas(int points, int draws, std::uint64_t seed, double p, const std::string& out) {
  const LemmaStudy study = lemma_constants(2, points, draws, seed, p);
  write_text(out, [&](std::ostream& o) {
    o << "# seed=" << seed << "\n# draws=" << draws << "\n# points=" << points << "\n";
    o << "inequality,max_ratio,all_finite\n";
    for (const auto& c : study.constants)
      o << c.name << ',' << format_number(c.max_ratio) << ',' << (c.all_finite ? "true" : "false") << '\n';
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oldroyd-B Besov diagnostics"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a simulation and write norm series");
  RunOptions sim_opts;
  sim_opts.attach(sim);
  std::string sim_out;
  sim->add_option("--out", sim_out, "output directory")->required();

  auto* xf = app.add_subcommand("xfun", "run a simulation and emit X(t)");
  RunOptions xf_opts;
  xf_opts.attach(xf);
  std::optional<double> xf_p;
  std::optional<int> xf_j0;
  std::string xf_out;
  xf->add_option("--p", xf_p, "integrability of the high channels, 2 <= p < 4");
  xf->add_option("--j0", xf_j0, "low/high split");
  xf->add_option("--out", xf_out, "CSV file (stdout if omitted)");

  auto* modes = app.add_subcommand("modes", "eigenvalue table of the linear symbol");
  double r_min = 0.1, r_max = 100;
  int r_points = 500;
  bool r_log = false;
  std::vector<double> physical;
  std::string modes_out;
  modes->add_option("--r-min", r_min);
  modes->add_option("--r-max", r_max);
  modes->add_option("--points", r_points);
  modes->add_flag("--log", r_log, "logarithmic radius spacing");
  modes->add_option("--physical", physical, "use the symbol of K1,K2,mu instead of the reference one")
      ->delimiter(',')
      ->expected(3);
  modes->add_option("--out", modes_out, "CSV file (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "identity suite on a snapshot");
  std::string verify_snapshot;
  int verify_j0 = DyadicPartition::kDefaultSplit;
  verify->add_option("--snapshot", verify_snapshot)->required()->check(CLI::ExistingFile);
  verify->add_option("--j0", verify_j0);

  auto* scaling = app.add_subcommand("scaling", "oscillating-data norm against epsilon");
  std::vector<double> eps;
  ScalingSetup setup;
  std::string scaling_out;
  scaling->add_option("--eps", eps, "epsilon values (1/eps integer)")->delimiter(',');
  scaling->add_option("--points", setup.points);
  scaling->add_option("--p", setup.p);
  scaling->add_option("--j0", setup.split);
  scaling->add_option("--width", setup.envelope_width, "envelope width");
  scaling->add_option("--amplitude", setup.amplitude);
  scaling->add_option("--out", scaling_out, "CSV file (stdout if omitted)");

  auto* besov = app.add_subcommand("besov", "block norms of a snapshot field, or lemma constants");
  std::string besov_snapshot, besov_field = "u", besov_range = "all", besov_out;
  double besov_s = 0, besov_p = 2;
  int besov_j0 = DyadicPartition::kDefaultSplit;
  bool lemmas = false;
  int lemma_points = 64, lemma_draws = 200;
  std::uint64_t lemma_seed = 0;
  besov->add_option("--snapshot", besov_snapshot)->check(CLI::ExistingFile);
  besov->add_option("--field", besov_field);
  besov->add_option("--s", besov_s);
  besov->add_option("--p", besov_p);
  besov->add_option("--range", besov_range);
  besov->add_option("--j0", besov_j0);
  besov->add_flag("--lemmas", lemmas, "empirical Bernstein, product and commutator constants");
  besov->add_option("--points", lemma_points);
  besov->add_option("--draws", lemma_draws);
  besov->add_option("--seed", lemma_seed);
  besov->add_option("--out", besov_out, "CSV file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return kExitInvalid;
  }

  try {
    if (*sim) return run_simulate(sim_opts, sim_out);
    if (*xf) return run_xfun(xf_opts, xf_p, xf_j0, xf_out);
    if (*modes) return run_modes(r_min, r_max, r_points, r_log, physical, modes_out);
    if (*verify) return run_verify(verify_snapshot, verify_j0);
    if (*scaling) return run_scaling(eps, setup, scaling_out);
    if (*besov) {
      if (lemmas) return run_lemmas(lemma_points, lemma_draws, lemma_seed, besov_p, besov_out);
      if (besov_snapshot.empty()) throw ConfigError("besov needs --snapshot or --lemmas");
      return run_besov(besov_snapshot, besov_field, besov_s, besov_p, besov_range, besov_j0, besov_out);
    }
  } catch (const BlowUpError& e) {
    emit_error(e.code(), e.what());
    return kExitBlowUp;
  } catch (const Error& e) {
    emit_error(e.code(), e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return kExitFailed;
  }
  return kExitFailed;
}
