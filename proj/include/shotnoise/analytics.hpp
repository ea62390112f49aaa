#pragma once

// Closed-form moments of the shot-noise satisfaction process.
//
// For X(t) = sum_i R_i exp(-mu (t - a_i)) over a Poisson(lambda) flow on (0, t):
//
//   mean(t)        = lambda m_R (1 - e^{-mu t}) / mu
//   variance(t)    = lambda (Var_R + m_R^2) (1 - e^{-2 mu t}) / (2 mu)
//   cov(t, t')     = lambda (1 - e^{-2 mu min(t,t')}) / (2 mu) * e^{-mu |t' - t|}
//
// The trickle case is m_R = 1, Var_R = 0. mu = 0 is an exact branch
// (Poisson counting process: mean = variance = lambda t, cov = lambda min(t,t')).

#include <string_view>
#include <utility>
#include <vector>

#include "shotnoise/poisson_flow.hpp"
#include "shotnoise/shot_noise.hpp"

namespace shotnoise {

// Searches with mu at or above this level are flagged as frustrated.
inline constexpr double kFrustrationThreshold = 0.008;

enum class Verdict { happy, unhappy };

std::string_view to_string(Verdict v);

struct Classification {
  Verdict verdict;
  bool frustration_flag;
};

struct RetentionReport {
  double lambda_hat;
  double mu;
  double srq;
  Verdict verdict;
  bool frustration_flag;
};

struct MomentCurve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> variance;
};

double mean_at(const ModelParams& params, double t);
double variance_at(const ModelParams& params, double t);

// (lambda / mu, lambda / (2 mu)); DomainError when mu == 0.
std::pair<double, double> stationary_moments(const ModelParams& params);

double covariance(const ModelParams& params, double t, double t_prime);

// Stationary autocovariance lambda / (2 mu) * e^{-mu |lag|}; DomainError when mu == 0.
double stationary_covariance(const ModelParams& params, double lag);

double burst_mean_at(const ModelParams& params, const MarkMoments& marks, double t);
double burst_variance_at(const ModelParams& params, const MarkMoments& marks, double t);

// Stationary mean lambda m_R / mu; equals retention_quotient for unit marks.
double burst_retention_quotient(const ModelParams& params, const MarkMoments& marks);

// Analytic mean/variance on the grid 0, step, ..., horizon. With `marks`
// the burst formulas are used.
MomentCurve moment_curve(const ModelParams& params, double horizon, double grid_step,
                         const MarkMoments* marks = nullptr);

double retention_quotient(double lambda_hat, double mu);

// happy iff srq > 1; frustrated iff mu >= kFrustrationThreshold.
Classification classify(double srq, double mu);

RetentionReport make_report(double lambda_hat, double mu);

}  // namespace shotnoise
