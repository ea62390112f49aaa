#pragma once

// Monte Carlo verification: replicate ensembles, long-run autocovariance
// estimation and scenario sweeps.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "shotnoise/analytics.hpp"
#include "shotnoise/poisson_flow.hpp"
#include "shotnoise/shot_noise.hpp"

namespace shotnoise {

struct EnsembleStats {
  std::vector<double> grid;
  std::vector<double> mc_mean;
  std::vector<double> mc_variance;  // unbiased (n - 1)
  std::vector<double> se_mean;      // sqrt(mc_variance / replicates)
  // Large-sample standard error of mc_variance, sqrt((m4 - m2^2) / n) from
  // the sample central moments.
  std::vector<double> se_variance;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

struct EnsembleConfig {
  ModelParams params;
  std::optional<MarkDistribution> marks;
  double horizon;
  double grid_step = kDefaultGridStep;
  std::size_t replicates;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// One replicate trajectory from its own stream (master_seed, index).
Trajectory simulate_replicate(const ModelParams& params, const std::optional<MarkDistribution>& marks,
                              double horizon, double grid_step, std::uint64_t master_seed,
                              std::uint64_t index);

// Replicates are aggregated in fixed blocks reduced in index order, so the
// result depends only on (config minus threads), never on scheduling.
EnsembleStats run_ensemble(const EnsembleConfig& config);

inline constexpr double kDefaultBurnInDecayTimes = 20.0;

struct AutocovarianceEstimate {
  std::vector<double> lags;
  std::vector<double> empirical;  // biased (divide by n) lag covariance
  std::vector<double> analytic;   // lambda / (2 mu) e^{-mu lag}
  double burn_in = 0.0;
  std::size_t samples = 0;  // post-burn-in grid points
};

struct AutocovarianceConfig {
  ModelParams params;
  double horizon;
  double grid_step = kDefaultGridStep;
  std::optional<double> burn_in;  // default 20 / mu
  double max_lag;
  std::optional<double> lag_step;  // default grid_step; must be a multiple of it
  std::uint64_t seed = 0;
};

// Single long trajectory, post-burn-in lag covariance. DomainError for mu = 0.
// `warning` (when non-null) receives a message if burn_in < 10 / mu.
AutocovarianceEstimate estimate_autocovariance(const AutocovarianceConfig& config,
                                               std::string* warning = nullptr);

// -slope of the least-squares line through (lag, log(C(lag) / C(0))) over
// lags with positive empirical covariance.
double fit_decay_rate(const AutocovarianceEstimate& estimate);

inline constexpr double kDefaultBitsPerSite = 100.0;

struct Scenario {
  double mu;
  double sites;
  double duration;
};

struct ScenarioResult {
  Scenario scenario;
  double lambda;
  Trajectory trajectory;
  double final_value;
  double max_value;
  double analytic_final_mean;
  double srq;
  Verdict verdict;
  bool frustration_flag;
};

// lambda = sites * bits_per_site / duration; scenario i draws from stream (seed, i).
std::vector<ScenarioResult> scenario_sweep(const std::vector<Scenario>& scenarios, double bits_per_site,
                                           double grid_step, std::uint64_t seed);

}  // namespace shotnoise
