// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "shotnoise/analytics.hpp"
#include "shotnoise/cli.hpp"
#include "shotnoise/montecarlo.hpp"

using namespace shotnoise;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::filesystem::path work_dir() {
  auto dir = std::filesystem::temp_directory_path() / "shotnoise_acceptance";
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
  const auto path = work_dir() / name;
  std::ofstream(path) << content;
  return path;
}

std::string evenly_spaced_log(double duration, int events) {
  std::ostringstream os;
  os << "duration_seconds=" << duration << '\n';
  for (int i = 1; i <= events; ++i) os << duration * i / (events + 1) << '\n';
  return os.str();
}

std::string report_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with(key + "=")) return line.substr(key.size() + 1);
  }
  return {};
}

// Max |z| and the fraction of instants with |z| > 3; zero SE counts as z = 0
// only when the estimate is exact.
struct ZSummary {
  double max_abs = 0.0;
  double frac_over_3 = 0.0;
};

ZSummary z_summary(const std::vector<double>& estimate, const std::vector<double>& truth,
                   const std::vector<double>& se) {
  ZSummary s;
  std::size_t over = 0;
  for (std::size_t j = 0; j < estimate.size(); ++j) {
    const double diff = estimate[j] - truth[j];
    const double z = se[j] > 0.0 ? diff / se[j] : (diff == 0.0 ? 0.0 : INFINITY);
    s.max_abs = std::max(s.max_abs, std::fabs(z));
    if (std::fabs(z) > 3.0) ++over;
  }
  s.frac_over_3 = static_cast<double>(over) / static_cast<double>(estimate.size());
  return s;
}

Outcome criterion_srq_reproduction() {
  struct Case {
    const char* name;
    double duration;
    int events;
    const char* srq;
    const char* verdict;
  };
  const Case cases[] = {{"A", 6980, 12, "1.719", "happy"},
                        {"B", 11500, 14, "1.217", "happy"},
                        {"C", 11360, 6, "0.528", "unhappy"}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto path = write_file(std::string("session_") + c.name + ".log", evenly_spaced_log(c.duration, c.events));
    const auto r = invoke({"analyze", "--input", path.string(), "--mu", "0.001"});
    const std::string srq = report_value(r.out, "srq");
    const std::string verdict = report_value(r.out, "verdict");
    const bool within = !srq.empty() && std::fabs(std::stod(srq) - std::stod(c.srq)) <= 0.001;
    ok = ok && r.code == 0 && within && verdict == c.verdict;
    detail += std::string(c.name) + ": srq=" + srq + " " + verdict + "; ";
  }
  return {ok, detail};
}

Outcome criterion_mc_moments() {
  const ModelParams p{0.005, 0.001};
  const auto start = std::chrono::steady_clock::now();
  const auto stats = run_ensemble(EnsembleConfig{p, std::nullopt, 4000.0, 1.0, 10000, 0, 0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto curve = moment_curve(p, 4000.0, 1.0);
  const auto zm = z_summary(stats.mc_mean, curve.mean, stats.se_mean);
  const auto zv = z_summary(stats.mc_variance, curve.variance, stats.se_variance);
  const bool ok = zm.max_abs <= 4.0 && zm.frac_over_3 <= 0.01 && zv.max_abs <= 4.0 && zv.frac_over_3 <= 0.01 &&
                  secs < 120.0;
  return {ok, fmt("mean max|z|=%.3f frac>3=%.4f; ", zm.max_abs, zm.frac_over_3) +
                  fmt("var max|z|=%.3f frac>3=%.4f; ", zv.max_abs, zv.frac_over_3) + fmt("%.1fs", secs)};
}

Outcome criterion_stationary() {
  bool ok = true;
  std::string detail;
  for (double mu : {0.001, 0.008, 0.02, 0.2, 0.5}) {
    const ModelParams p{0.005, mu};
    const auto [m, v] = stationary_moments(p);
    const double rm = std::fabs(mean_at(p, 20.0 / mu) - m) / m;
    const double rv = std::fabs(variance_at(p, 20.0 / mu) - v) / v;
    ok = ok && rm <= 1e-6 && rv <= 1e-6;
    detail += fmt("mu=%g rel(mean)=%.1e rel(var)=%.1e; ", mu, rm, rv);
  }
  return {ok, detail};
}

Outcome criterion_autocovariance() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double mu : {0.001, 0.008, 0.02}) {
    const double burn_in = kDefaultBurnInDecayTimes / mu;
    const double max_lag = 1.0 / mu;
    // 2e6 post-burn-in samples at 1 s, lags on a 20-step ladder up to one decay time
    const AutocovarianceConfig cfg{ModelParams{0.005, mu}, burn_in + 2e6, 1.0, burn_in, max_lag,
                                   std::max(1.0, std::round(max_lag / 20.0)), 0};
    const double mu_hat = fit_decay_rate(estimate_autocovariance(cfg));
    const double rel = std::fabs(mu_hat - mu) / mu;
    ok = ok && rel <= 0.10;
    detail += fmt("mu=%g mu_hat=%.5g rel=%.3f; ", mu, mu_hat, rel);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 300.0;
  return {ok, detail + fmt("%.1fs", secs)};
}

Outcome criterion_no_decay_limit() {
  const ModelParams p{0.02, 0.0};
  bool steps = true;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto traj = simulate_replicate(p, std::nullopt, 2000.0, 1.0, 0, r);
    for (std::size_t j = 1; j < traj.size(); ++j) {
      steps = steps && traj.values[j] >= traj.values[j - 1] && traj.values[j] == std::floor(traj.values[j]);
    }
  }
  bool moments = true, cov = true;
  for (double t = 0.0; t <= 5000.0; t += 12.5) {
    moments = moments && mean_at(p, t) == p.lambda * t && variance_at(p, t) == p.lambda * t;
    for (double tp = 0.0; tp <= 5000.0; tp += 250.0) cov = cov && covariance(p, t, tp) == p.lambda * std::min(t, tp);
  }
  return {steps && moments && cov, std::string("step paths ") + (steps ? "ok" : "BAD") + ", mean=var=lambda t " +
                                       (moments ? "ok" : "BAD") + ", cov=lambda min " + (cov ? "ok" : "BAD")};
}

double flowcheck_gap(const std::string& alpha) {
  const auto r = invoke({"flowcheck", "--alpha", alpha, "--horizon", alpha, "--k", "0", "--l", "1", "--reps",
                         "10000", "--seed", "0"});
  if (r.code != 0) return INFINITY;
  const std::string key = "# max_abs_binomial_minus_poisson=";
  const auto pos = r.out.find(key);
  return pos == std::string::npos ? INFINITY : std::stod(r.out.substr(pos + key.size()));
}

Outcome criterion_poisson_limit() {
  const double g100 = flowcheck_gap("100");
  const double g1000 = flowcheck_gap("1000");
  return {g1000 <= 0.01 && g1000 < g100, fmt("alpha=100 gap=%.3e, alpha=1000 gap=%.3e", g100, g1000)};
}

Outcome criterion_burst() {
  const ModelParams p{0.005, 0.001};
  const auto three = MarkDistribution::constant(3.0);
  const auto stats = run_ensemble(EnsembleConfig{p, three, 4000.0, 1.0, 10000, 0, 0});
  bool ok = true;
  std::string detail;
  for (double t : {1000.0, 2000.0, 4000.0}) {
    const auto j = static_cast<std::size_t>(t);
    const double zm = (stats.mc_mean[j] - burst_mean_at(p, three.moments(), t)) / stats.se_mean[j];
    const double zv = (stats.mc_variance[j] - burst_variance_at(p, three.moments(), t)) / stats.se_variance[j];
    ok = ok && std::fabs(zm) <= 3.0 && std::fabs(zv) <= 3.0;
    detail += fmt("t=%g z_mean=%.2f z_var=%.2f; ", t, zm, zv);
  }

  const auto unit = run_ensemble(EnsembleConfig{p, MarkDistribution::constant(1.0), 4000.0, 1.0, 500, 3, 0});
  const auto plain = run_ensemble(EnsembleConfig{p, std::nullopt, 4000.0, 1.0, 500, 3, 0});
  const bool identical = unit.mc_mean == plain.mc_mean && unit.mc_variance == plain.mc_variance;
  const auto sim = [](const char* marks) {
    return invoke({"simulate", "--lambda", "0.005", "--mu", "0.001", "--duration", "4000", "--marks", marks}).out;
  };
  const auto strip_header = [](const std::string& s) { return s.substr(s.find("t,x")); };
  const bool cli_identical = strip_header(sim("constant:1")) == strip_header(sim("none"));
  ok = ok && identical && cli_identical;
  return {ok, detail + "unit marks bit-identical: " + (identical && cli_identical ? "yes" : "NO")};
}

Outcome criterion_fig1_ordering() {
  std::vector<Scenario> scenarios;
  for (double mu : {0.001, 0.008, 0.02, 0.2, 0.5}) scenarios.push_back({mu, 10, 4000});
  const auto results = scenario_sweep(scenarios, kDefaultBitsPerSite, 1.0, 0);
  bool decreasing = true;
  std::string detail = "final analytic means:";
  for (std::size_t i = 0; i < results.size(); ++i) {
    detail += fmt(" %.4g", results[i].analytic_final_mean);
    if (i > 0) decreasing = decreasing && results[i].analytic_final_mean < results[i - 1].analytic_final_mean;
  }
  const double srq_high = results.back().srq;
  return {decreasing && srq_high < 1.0, detail + fmt("; srq(mu=0.5)=%.3f", srq_high)};
}

Outcome criterion_determinism() {
  const auto session = write_file("determinism.log", evenly_spaced_log(6980, 12));
  const auto scen = write_file("determinism_scenarios.txt", "0.001,10,4000\n0.02,10,4000\n0.5,10,4000\n");
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--lambda", "0.005", "--mu", "0.001", "--duration", "4000", "--seed", "7", "--marks", "geometric:0.5"},
      {"moments", "--lambda", "0.005", "--mu", "0.001", "--duration", "4000", "--mark-mean", "2", "--mark-var", "2"},
      {"ensemble", "--lambda", "0.005", "--mu", "0.001", "--duration", "1000", "--reps", "500", "--seed", "4"},
      {"autocorr", "--lambda", "0.005", "--mu", "0.01", "--duration", "50000", "--max-lag", "200", "--lag-step", "10"},
      {"analyze", "--input", session.string(), "--mu", "0.001"},
      {"flowcheck", "--alpha", "100", "--horizon", "100", "--k", "0", "--l", "1", "--reps", "5000", "--seed", "2"},
      {"scenario", "--input", scen.string(), "--seed", "9"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& cmd : commands) {
    const auto a = invoke(cmd), b = invoke(cmd);
    const bool same = a.code == 0 && b.code == 0 && a.out == b.out && !a.out.empty();
    ok = ok && same;
    detail += cmd.front() + (same ? "=ok " : "=DIFF ");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 session SRQ reproduction", criterion_srq_reproduction},
      {"2 MC vs closed-form mean/variance", criterion_mc_moments},
      {"3 stationary regime", criterion_stationary},
      {"4 autocovariance decay rate", criterion_autocovariance},
      {"5 mu -> 0 limit", criterion_no_decay_limit},
      {"6 binomial -> Poisson limit", criterion_poisson_limit},
      {"7 burst-case formulas", criterion_burst},
      {"8 scenario ordering", criterion_fig1_ordering},
      {"9 determinism", criterion_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %s -- %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
