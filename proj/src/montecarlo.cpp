#include "shotnoise/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "shotnoise/errors.hpp"

namespace shotnoise {

namespace {

constexpr std::size_t kBlockSize = 64;

// Per-instant central moment sums (mean, M2, M3, M4) over a common count.
struct MomentBlock {
  double count = 0.0;
  std::vector<double> mean, m2, m3, m4;

  explicit MomentBlock(std::size_t n) : mean(n, 0.0), m2(n, 0.0), m3(n, 0.0), m4(n, 0.0) {}

  // Pebay (2008) pairwise update of the first four central moments.
  void merge(const MomentBlock& b) {
    const double na = count, nb = b.count, n = na + nb;
    if (nb == 0.0) return;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double d = b.mean[j] - mean[j];
      const double d_n = d / n;
      const double d_n2 = d_n * d_n;
      const double term1 = d * d_n * na * nb;
      m4[j] += b.m4[j] + term1 * d_n2 * (na * na - na * nb + nb * nb) +
               6.0 * d_n2 * (na * na * b.m2[j] + nb * nb * m2[j]) +
               4.0 * d_n * (na * b.m3[j] - nb * m3[j]);
      m3[j] += b.m3[j] + term1 * d_n * (na - nb) + 3.0 * d_n * (na * b.m2[j] - nb * m2[j]);
      m2[j] += b.m2[j] + term1;
      mean[j] += nb * d_n;
    }
    count = n;
  }

  void add(const std::vector<double>& x) {
    const double n = count + 1.0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      // merge() specialised to a single observation
      const double d = x[j] - mean[j];
      const double d_n = d / n;
      const double d_n2 = d_n * d_n;
      const double term1 = d * d_n * count;
      m4[j] += term1 * d_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * d_n2 * m2[j] - 4.0 * d_n * m3[j];
      m3[j] += term1 * d_n * (n - 2.0) - 3.0 * d_n * m2[j];
      m2[j] += term1;
      mean[j] += d_n;
    }
    count = n;
  }
};

}  // namespace

Trajectory simulate_replicate(const ModelParams& params, const std::optional<MarkDistribution>& marks,
                              double horizon, double grid_step, std::uint64_t master_seed,
                              std::uint64_t index) {
  Rng rng = Rng::for_stream(master_seed, index);
  const auto count = static_cast<std::size_t>(sample_count(params, horizon, rng));
  const ArrivalSequence arrivals = sample_arrivals(count, horizon, rng);
  if (marks) {
    const auto values = sample_marks(*marks, count, rng);
    return evaluate_trajectory_marked(arrivals, values, params.mu, grid_step);
  }
  return evaluate_trajectory(arrivals, params.mu, grid_step);
}

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  config.params.validate();
  if (config.replicates < 2) throw ParameterError("replicates must be >= 2");
  const std::size_t n_grid = grid_size(config.horizon, config.grid_step);

  const std::size_t n_blocks = (config.replicates + kBlockSize - 1) / kBlockSize;
  std::vector<MomentBlock> blocks(n_blocks, MomentBlock(0));

  std::atomic<std::size_t> next_block{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      MomentBlock acc(n_grid);
      const std::size_t first = b * kBlockSize;
      const std::size_t last = std::min(first + kBlockSize, config.replicates);
      for (std::size_t r = first; r < last; ++r) {
        const Trajectory traj = simulate_replicate(config.params, config.marks, config.horizon,
                                                   config.grid_step, config.master_seed, r);
        acc.add(traj.values);
      }
      blocks[b] = std::move(acc);
    }
  };

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  MomentBlock total = std::move(blocks.front());
  for (std::size_t b = 1; b < n_blocks; ++b) total.merge(blocks[b]);

  const auto n = static_cast<double>(config.replicates);
  EnsembleStats stats;
  stats.replicates = config.replicates;
  stats.seed = config.master_seed;
  stats.grid.resize(n_grid);
  stats.mc_mean = total.mean;
  stats.mc_variance.resize(n_grid);
  stats.se_mean.resize(n_grid);
  stats.se_variance.resize(n_grid);
  for (std::size_t j = 0; j < n_grid; ++j) {
    stats.grid[j] = static_cast<double>(j) * config.grid_step;
    const double var = std::max(0.0, total.m2[j] / (n - 1.0));
    stats.mc_variance[j] = var;
    stats.se_mean[j] = std::sqrt(var / n);
    const double c2 = total.m2[j] / n;
    const double c4 = total.m4[j] / n;
    stats.se_variance[j] = std::sqrt(std::max(0.0, c4 - c2 * c2) / n);
  }
  return stats;
}

AutocovarianceEstimate estimate_autocovariance(const AutocovarianceConfig& config, std::string* warning) {
  const ModelParams& params = config.params;
  params.validate();
  if (params.mu == 0.0) {
    throw DomainError("mu = 0 never reaches a stationary regime; autocovariance is undefined");
  }
  const double burn_in = config.burn_in.value_or(kDefaultBurnInDecayTimes / params.mu);
  const double lag_step = config.lag_step.value_or(config.grid_step);
  if (!std::isfinite(burn_in) || burn_in < 0.0) throw ParameterError("burn_in must be finite and >= 0");
  if (!std::isfinite(config.max_lag) || config.max_lag < 0.0) {
    throw ParameterError("max_lag must be finite and >= 0");
  }
  if (!std::isfinite(lag_step) || lag_step <= 0.0) throw ParameterError("lag_step must be > 0");
  const std::size_t n_grid = grid_size(config.horizon, config.grid_step);
  if (config.horizon - burn_in < 10.0 * config.max_lag) {
    throw ParameterError("horizon - burn_in must be at least 10 * max_lag");
  }
  const double steps_per_lag = lag_step / config.grid_step;
  const double rounded = std::round(steps_per_lag);
  if (rounded < 1.0 || std::fabs(steps_per_lag - rounded) > 1e-9 * rounded) {
    throw ParameterError("lag_step must be a positive multiple of grid_step");
  }
  if (warning && burn_in < 10.0 / params.mu) {
    *warning = "burn_in " + std::to_string(burn_in) + " s is shorter than 10/mu = " +
               std::to_string(10.0 / params.mu) + " s; the transient may bias the estimate";
  }

  Rng rng = Rng::for_stream(config.seed, 0);
  const auto count = static_cast<std::size_t>(sample_count(params, config.horizon, rng));
  const ArrivalSequence arrivals = sample_arrivals(count, config.horizon, rng);
  const Trajectory traj = evaluate_trajectory(arrivals, params.mu, config.grid_step);

  const auto start = static_cast<std::size_t>(std::ceil(burn_in / config.grid_step * (1.0 - 1e-12)));
  if (start >= n_grid) throw ParameterError("burn_in leaves no samples");
  std::vector<double> seg(traj.values.begin() + static_cast<std::ptrdiff_t>(start), traj.values.end());
  const std::size_t n = seg.size();
  double mean = 0.0;
  for (double v : seg) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : seg) v -= mean;

  AutocovarianceEstimate est;
  est.burn_in = burn_in;
  est.samples = n;
  const auto stride = static_cast<std::size_t>(rounded);
  for (std::size_t k = 0;; k += stride) {
    const double lag = static_cast<double>(k) * config.grid_step;
    if (lag > config.max_lag * (1.0 + 1e-12)) break;
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += seg[i] * seg[i + k];
    est.lags.push_back(lag);
    est.empirical.push_back(acc / static_cast<double>(n));
    est.analytic.push_back(stationary_covariance(params, lag));
  }
  return est;
}

double fit_decay_rate(const AutocovarianceEstimate& estimate) {
  if (estimate.empirical.empty() || !(estimate.empirical.front() > 0.0)) {
    throw DomainError("lag-0 covariance must be positive to fit a decay rate");
  }
  const double c0 = estimate.empirical.front();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < estimate.lags.size(); ++i) {
    if (estimate.empirical[i] > 0.0) {
      xs.push_back(estimate.lags[i]);
      ys.push_back(std::log(estimate.empirical[i] / c0));
    }
  }
  if (xs.size() < 2) throw DomainError("need at least two lags with positive covariance");
  const auto m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return -sxy / sxx;
}

std::vector<ScenarioResult> scenario_sweep(const std::vector<Scenario>& scenarios, double bits_per_site,
                                           double grid_step, std::uint64_t seed) {
  if (scenarios.empty()) throw ParameterError("scenario list is empty");
  if (!std::isfinite(bits_per_site) || bits_per_site <= 0.0) {
    throw ParameterError("bits_per_site must be finite and > 0");
  }
  std::vector<ScenarioResult> out;
  out.reserve(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    if (!std::isfinite(s.sites) || s.sites <= 0.0) throw ParameterError("sites must be finite and > 0");
    if (!std::isfinite(s.duration) || s.duration <= 0.0) {
      throw ParameterError("duration must be finite and > 0");
    }
    const ModelParams params{s.sites * bits_per_site / s.duration, s.mu};
    params.validate();
    Trajectory traj = simulate_replicate(params, std::nullopt, s.duration, grid_step, seed, i);
    const double final_value = traj.values.back();
    const double max_value = *std::max_element(traj.values.begin(), traj.values.end());
    const double analytic_final = mean_at(params, traj.grid.back());
    // SRQ needs mu > 0; mu = 0 scenarios are unbounded and never unhappy.
    double srq = std::numeric_limits<double>::infinity();
    Classification cls{Verdict::happy, false};
    if (params.mu > 0.0) {
      srq = retention_quotient(params.lambda, params.mu);
      cls = classify(srq, params.mu);
    }
    out.push_back(ScenarioResult{s, params.lambda, std::move(traj), final_value, max_value,
                                 analytic_final, srq, cls.verdict, cls.frustration_flag});
  }
  return out;
}

}  // namespace shotnoise
