#include "shotnoise/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shotnoise/analytics.hpp"
#include "shotnoise/errors.hpp"
#include "shotnoise/poisson_flow.hpp"
#include "shotnoise/session.hpp"

namespace shotnoise::cli {

namespace {

// Opened --out target, or the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw FormatError(0, "cannot open output '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  os << "t,x\n";
  for (std::size_t j = 0; j < traj.size(); ++j) {
    os << format_number(traj.grid[j]) << ',' << format_number(traj.values[j]) << '\n';
  }
}

std::string mark_label(const std::string& spec) { return spec.empty() ? "none" : spec; }

struct SimulateOpts {
  double lambda = 0, mu = 0, duration = 0, grid_step = kDefaultGridStep;
  std::uint64_t seed = 0;
  std::string marks = "none";
  std::string out;
};

struct MomentsOpts {
  double lambda = 0, mu = 0, duration = 0, grid_step = kDefaultGridStep;
  std::optional<double> mark_mean, mark_var;
};

struct EnsembleOpts {
  SimulateOpts sim;
  std::size_t reps = 0;
  unsigned threads = 0;
};

struct AutocorrOpts {
  double lambda = 0, mu = 0, duration = 0, grid_step = kDefaultGridStep, max_lag = 0;
  std::optional<double> burn_in, lag_step;
  std::uint64_t seed = 0;
};

struct AnalyzeOpts {
  std::string input, trajectory_out;
  double mu = 0, grid_step = kDefaultGridStep;
};

struct FlowcheckOpts {
  std::size_t alpha = 0, reps = 0;
  double horizon = 0, k = 0, l = 0;
  std::uint64_t seed = 0;
};

struct ScenarioOpts {
  std::string input, trajectories_out;
  double bits_per_site = kDefaultBitsPerSite, grid_step = kDefaultGridStep;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  const ModelParams params{o.lambda, o.mu};
  params.validate();
  const auto marks = parse_mark_spec(o.marks);
  const Trajectory traj = simulate_replicate(params, marks, o.duration, o.grid_step, o.seed, 0);

  Sink sink(o.out, out);
  *sink << "# shotnoise simulate\n"
        << "# lambda=" << format_number(o.lambda) << " mu=" << format_number(o.mu)
        << " duration=" << format_number(o.duration) << " grid_step=" << format_number(o.grid_step)
        << " seed=" << o.seed << " marks=" << mark_label(o.marks) << '\n';
  write_trajectory(*sink, traj);
  return kSuccess;
}

int cmd_moments(const MomentsOpts& o, std::ostream& out) {
  const ModelParams params{o.lambda, o.mu};
  params.validate();
  if (o.mark_mean.has_value() != o.mark_var.has_value()) {
    throw ParameterError("--mark-mean and --mark-var must be given together");
  }
  std::optional<MarkMoments> marks;
  if (o.mark_mean) {
    marks = MarkMoments{*o.mark_mean, *o.mark_var};
    marks->validate();
  }
  const MomentCurve curve = moment_curve(params, o.duration, o.grid_step, marks ? &*marks : nullptr);

  out << "# shotnoise moments\n"
      << "# lambda=" << format_number(o.lambda) << " mu=" << format_number(o.mu)
      << " duration=" << format_number(o.duration) << " grid_step=" << format_number(o.grid_step);
  if (marks) {
    out << " mark_mean=" << format_number(marks->mean) << " mark_var=" << format_number(marks->variance);
  }
  out << "\nt,mean,variance\n";
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    out << format_number(curve.grid[j]) << ',' << format_number(curve.mean[j]) << ','
        << format_number(curve.variance[j]) << '\n';
  }
  return kSuccess;
}

int cmd_ensemble(const EnsembleOpts& o, std::ostream& out) {
  const SimulateOpts& s = o.sim;
  EnsembleConfig cfg{ModelParams{s.lambda, s.mu}, parse_mark_spec(s.marks), s.duration, s.grid_step,
                     o.reps, s.seed, o.threads};
  cfg.params.validate();
  const EnsembleStats stats = run_ensemble(cfg);
  const std::optional<MarkMoments> mm =
      cfg.marks ? std::optional<MarkMoments>(cfg.marks->moments()) : std::nullopt;
  const MomentCurve curve = moment_curve(cfg.params, s.duration, s.grid_step, mm ? &*mm : nullptr);

  Sink sink(s.out, out);
  std::ostream& os = *sink;
  os << "# shotnoise ensemble\n"
     << "# lambda=" << format_number(s.lambda) << " mu=" << format_number(s.mu)
     << " duration=" << format_number(s.duration) << " grid_step=" << format_number(s.grid_step)
     << " seed=" << s.seed << " marks=" << mark_label(s.marks) << " reps=" << o.reps << '\n'
     << "t,analytic_mean,mc_mean,se_mean,analytic_var,mc_var,z_mean\n";
  double max_abs_z = 0.0;
  std::size_t over3 = 0;
  for (std::size_t j = 0; j < stats.grid.size(); ++j) {
    const double diff = stats.mc_mean[j] - curve.mean[j];
    double z = 0.0;
    if (stats.se_mean[j] > 0.0) {
      z = diff / stats.se_mean[j];
    } else if (diff != 0.0) {
      z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    max_abs_z = std::max(max_abs_z, std::fabs(z));
    if (std::fabs(z) > 3.0) ++over3;
    os << format_number(stats.grid[j]) << ',' << format_number(curve.mean[j]) << ','
       << format_number(stats.mc_mean[j]) << ',' << format_number(stats.se_mean[j]) << ','
       << format_number(curve.variance[j]) << ',' << format_number(stats.mc_variance[j]) << ','
       << format_number(z) << '\n';
  }
  os << "# max_abs_z_mean=" << format_number(max_abs_z) << " fraction_abs_z_over_3="
     << format_number(static_cast<double>(over3) / static_cast<double>(stats.grid.size())) << '\n';
  return kSuccess;
}

int cmd_autocorr(const AutocorrOpts& o, std::ostream& out, std::ostream& err) {
  AutocovarianceConfig cfg{ModelParams{o.lambda, o.mu}, o.duration, o.grid_step, o.burn_in,
                           o.max_lag, o.lag_step, o.seed};
  std::string warning;
  const AutocovarianceEstimate est = estimate_autocovariance(cfg, &warning);
  if (!warning.empty()) err << "warning: " << warning << '\n';

  out << "# shotnoise autocorr\n"
      << "# lambda=" << format_number(o.lambda) << " mu=" << format_number(o.mu)
      << " duration=" << format_number(o.duration) << " grid_step=" << format_number(o.grid_step)
      << " burn_in=" << format_number(est.burn_in) << " max_lag=" << format_number(o.max_lag)
      << " lag_step=" << format_number(o.lag_step.value_or(o.grid_step)) << " seed=" << o.seed << '\n'
      << "lag,empirical_cov,analytic_cov\n";
  for (std::size_t i = 0; i < est.lags.size(); ++i) {
    out << format_number(est.lags[i]) << ',' << format_number(est.empirical[i]) << ','
        << format_number(est.analytic[i]) << '\n';
  }
  if (est.lags.size() >= 2) {
    try {
      out << "# fitted_mu=" << format_number(fit_decay_rate(est)) << '\n';
    } catch (const DomainError&) {
      out << "# fitted_mu=nan\n";
    }
  }
  return kSuccess;
}

int cmd_analyze(const AnalyzeOpts& o, std::ostream& out) {
  if (!std::isfinite(o.mu) || o.mu <= 0.0) throw ParameterError("--mu must be > 0");
  const SessionLog log = read_session_log(o.input);
  const SessionAnalysis analysis = analyze_session(log, o.mu, o.grid_step);
  const RetentionReport& r = analysis.report;

  char srq[64];
  std::snprintf(srq, sizeof srq, "%.3f", r.srq);
  out << "events=" << log.events.size() << '\n'
      << "duration_seconds=" << format_number(log.duration) << '\n'
      << "lambda_hat=" << format_number(r.lambda_hat) << '\n'
      << "mu=" << format_number(r.mu) << '\n'
      << "srq=" << srq << '\n'
      << "verdict=" << to_string(r.verdict) << '\n'
      << "frustration_flag=" << (r.frustration_flag ? "true" : "false") << '\n';

  if (!o.trajectory_out.empty()) {
    Sink sink(o.trajectory_out, out);
    *sink << "# shotnoise analyze input=" << o.input << " mu=" << format_number(o.mu)
          << " grid_step=" << format_number(o.grid_step) << '\n';
    write_trajectory(*sink, analysis.trajectory);
  }
  return kSuccess;
}

int cmd_flowcheck(const FlowcheckOpts& o, std::ostream& out) {
  const IntervalCountExperiment exp{o.alpha, o.horizon, o.k, o.l};
  exp.validate();
  if (o.reps == 0) throw ParameterError("--reps must be >= 1");

  std::vector<std::size_t> freq(o.alpha + 1, 0);
  for (std::size_t rep = 0; rep < o.reps; ++rep) {
    Rng rng = Rng::for_stream(o.seed, rep);
    const ArrivalSequence points = sample_arrivals(o.alpha, o.horizon, rng);
    ++freq[count_in_interval(points, o.k, o.l)];
  }

  const double beta = static_cast<double>(o.alpha) / o.horizon * (o.l - o.k);
  out << "# shotnoise flowcheck\n"
      << "# alpha=" << o.alpha << " horizon=" << format_number(o.horizon) << " k=" << format_number(o.k)
      << " l=" << format_number(o.l) << " reps=" << o.reps << " seed=" << o.seed
      << " beta=" << format_number(beta) << '\n'
      << "r,empirical_freq,binomial_pmf,poisson_pmf\n";
  double max_gap = 0.0;
  for (std::size_t r = 0; r <= o.alpha; ++r) {
    const double b = binomial_count_pmf(exp, r);
    const double p = poisson_limit_pmf(beta, r);
    max_gap = std::max(max_gap, std::fabs(b - p));
    out << r << ',' << format_number(static_cast<double>(freq[r]) / static_cast<double>(o.reps)) << ','
        << format_number(b) << ',' << format_number(p) << '\n';
  }
  out << "# max_abs_binomial_minus_poisson=" << format_number(max_gap) << '\n';
  return kSuccess;
}

int cmd_scenario(const ScenarioOpts& o, std::ostream& out) {
  std::ifstream in(o.input);
  if (!in) throw FormatError(0, "cannot open '" + o.input + "'");
  const std::vector<Scenario> scenarios = parse_scenarios(in);
  const auto results = scenario_sweep(scenarios, o.bits_per_site, o.grid_step, o.seed);

  out << "# shotnoise scenario\n"
      << "# input=" << o.input << " bits_per_site=" << format_number(o.bits_per_site)
      << " grid_step=" << format_number(o.grid_step) << " seed=" << o.seed << '\n'
      << "scenario,mu,sites,duration,lambda,final_value,max_value,analytic_final_mean,srq,verdict,"
         "frustration_flag\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ScenarioResult& r = results[i];
    out << i << ',' << format_number(r.scenario.mu) << ',' << format_number(r.scenario.sites) << ','
        << format_number(r.scenario.duration) << ',' << format_number(r.lambda) << ','
        << format_number(r.final_value) << ',' << format_number(r.max_value) << ','
        << format_number(r.analytic_final_mean) << ',' << format_number(r.srq) << ','
        << to_string(r.verdict) << ',' << (r.frustration_flag ? "true" : "false") << '\n';
  }

  if (!o.trajectories_out.empty()) {
    Sink sink(o.trajectories_out, out);
    *sink << "# shotnoise scenario trajectories seed=" << o.seed << '\n' << "scenario,t,x\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Trajectory& traj = results[i].trajectory;
      for (std::size_t j = 0; j < traj.size(); ++j) {
        *sink << i << ',' << format_number(traj.grid[j]) << ',' << format_number(traj.values[j]) << '\n';
      }
    }
  }
  return kSuccess;
}

void add_model_flags(CLI::App* sub, double& lambda, double& mu, double& duration, double& grid_step) {
  sub->add_option("--lambda", lambda, "event rate, events per second (> 0)")->required();
  sub->add_option("--mu", mu, "satisfaction decay rate, 1/s (>= 0)")->required();
  sub->add_option("--duration", duration, "horizon in seconds (> 0)")->required();
  sub->add_option("--grid-step", grid_step, "grid spacing in seconds");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::optional<MarkDistribution> parse_mark_spec(std::string_view spec) {
  if (spec.empty() || spec == "none") return std::nullopt;
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ParameterError("mark spec must be none, constant:V or geometric:P");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string value_text(spec.substr(colon + 1));
  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(value_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value_text.size()) {
    throw ParameterError("mark spec value '" + value_text + "' is not a number");
  }
  if (kind == "constant") return MarkDistribution::constant(value);
  if (kind == "geometric") return MarkDistribution::geometric(value);
  throw ParameterError("unknown mark kind '" + std::string(kind) + "'");
}

std::vector<Scenario> parse_scenarios(std::istream& in) {
  std::vector<Scenario> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Scenario s{};
    char c1 = 0, c2 = 0;
    std::string rest;
    if (!(fields >> s.mu >> c1 >> s.sites >> c2 >> s.duration) || c1 != ',' || c2 != ',' ||
        (fields >> rest && !rest.empty())) {
      throw FormatError(line_no, "expected 'mu,sites,duration'");
    }
    if (!(s.mu >= 0.0) || !(s.sites > 0.0) || !(s.duration > 0.0) || !std::isfinite(s.mu) ||
        !std::isfinite(s.sites) || !std::isfinite(s.duration)) {
      throw FormatError(line_no, "need mu >= 0, sites > 0, duration > 0");
    }
    out.push_back(s);
  }
  if (out.empty()) throw FormatError(0, "scenario list is empty");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shot-noise model of searcher satisfaction: simulation, analytics and session scoring",
               "shotnoise"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "simulate one satisfaction trajectory (CSV t,x)");
  add_model_flags(simulate, sim.lambda, sim.mu, sim.duration, sim.grid_step);
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--marks", sim.marks, "burst sizes: none | constant:V | geometric:P");
  simulate->add_option("--out", sim.out, "write CSV here instead of stdout");

  MomentsOpts mom;
  auto* moments = app.add_subcommand("moments", "analytic mean and variance curves (CSV t,mean,variance)");
  add_model_flags(moments, mom.lambda, mom.mu, mom.duration, mom.grid_step);
  moments->add_option("--mark-mean", mom.mark_mean, "burst size mean m_R (with --mark-var)");
  moments->add_option("--mark-var", mom.mark_var, "burst size variance Var_R (with --mark-mean)");

  EnsembleOpts ens;
  auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo ensemble vs closed-form moments");
  add_model_flags(ensemble, ens.sim.lambda, ens.sim.mu, ens.sim.duration, ens.sim.grid_step);
  ensemble->add_option("--reps", ens.reps, "number of replicates (>= 2)")->required();
  ensemble->add_option("--seed", ens.sim.seed, "master seed");
  ensemble->add_option("--marks", ens.sim.marks, "burst sizes: none | constant:V | geometric:P");
  ensemble->add_option("--threads", ens.threads, "worker threads (0 = all cores); output is unaffected");
  ensemble->add_option("--out", ens.sim.out, "write CSV here instead of stdout");

  AutocorrOpts ac;
  auto* autocorr = app.add_subcommand("autocorr", "stationary autocovariance of one long trajectory");
  add_model_flags(autocorr, ac.lambda, ac.mu, ac.duration, ac.grid_step);
  autocorr->add_option("--max-lag", ac.max_lag, "largest lag in seconds")->required();
  autocorr->add_option("--burn-in", ac.burn_in, "seconds discarded first (default 20/mu)");
  autocorr->add_option("--lag-step", ac.lag_step, "lag spacing, a multiple of --grid-step (default grid step)");
  autocorr->add_option("--seed", ac.seed, "random seed");

  AnalyzeOpts an;
  auto* analyze = app.add_subcommand("analyze", "score a recorded browsing session");
  analyze->add_option("--input", an.input, "session log file")->required();
  analyze->add_option("--mu", an.mu, "decay rate, 1/s (> 0)")->required();
  analyze->add_option("--grid-step", an.grid_step, "trajectory grid spacing in seconds");
  analyze->add_option("--trajectory-out", an.trajectory_out, "also write the session trajectory CSV");

  FlowcheckOpts fc;
  auto* flowcheck = app.add_subcommand("flowcheck", "interval counts of uniform points vs binomial/Poisson laws");
  flowcheck->add_option("--alpha", fc.alpha, "number of uniform points")->required();
  flowcheck->add_option("--horizon", fc.horizon, "interval (0, T) length")->required();
  flowcheck->add_option("--k", fc.k, "counting interval start")->required();
  flowcheck->add_option("--l", fc.l, "counting interval end")->required();
  flowcheck->add_option("--reps", fc.reps, "number of experiments")->required();
  flowcheck->add_option("--seed", fc.seed, "master seed")->required();

  ScenarioOpts sc;
  auto* scenario = app.add_subcommand("scenario", "sweep (mu, sites, duration) scenarios");
  scenario->add_option("--input", sc.input, "scenario file, one mu,sites,duration per line")->required();
  scenario->add_option("--bits-per-site", sc.bits_per_site, "favorable events per web-site");
  scenario->add_option("--grid-step", sc.grid_step, "grid spacing in seconds");
  scenario->add_option("--seed", sc.seed, "master seed");
  scenario->add_option("--trajectories-out", sc.trajectories_out, "also write all trajectories (CSV scenario,t,x)");

  std::vector<const char*> argv{"shotnoise"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kArgumentError;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*moments) return cmd_moments(mom, out);
    if (*ensemble) return cmd_ensemble(ens, out);
    if (*autocorr) return cmd_autocorr(ac, out, err);
    if (*analyze) return cmd_analyze(an, out);
    if (*flowcheck) return cmd_flowcheck(fc, out);
    if (*scenario) return cmd_scenario(sc, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kArgumentError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kArgumentError;
  }
  return kArgumentError;
}

}  // namespace shotnoise::cli
