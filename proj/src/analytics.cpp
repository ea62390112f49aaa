#include "shotnoise/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "shotnoise/errors.hpp"

namespace shotnoise {

namespace {

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ParameterError("time must be finite and >= 0");
}

// (1 - e^{-rate t}) / rate, with the rate -> 0 limit t.
double saturating(double rate, double t) {
  if (rate == 0.0) return t;
  return -std::expm1(-rate * t) / rate;
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::happy ? "happy" : "unhappy"; }

double mean_at(const ModelParams& params, double t) {
  params.validate();
  require_time(t);
  return params.lambda * saturating(params.mu, t);
}

double variance_at(const ModelParams& params, double t) {
  params.validate();
  require_time(t);
  return params.lambda * saturating(2.0 * params.mu, t);
}

std::pair<double, double> stationary_moments(const ModelParams& params) {
  params.validate();
  if (params.mu == 0.0) throw DomainError("no stationary regime when mu = 0");
  return {params.lambda / params.mu, params.lambda / (2.0 * params.mu)};
}

double covariance(const ModelParams& params, double t, double t_prime) {
  require_time(t_prime);
  // variance_at validates params and t; e^{0} == 1 keeps cov(t, t) == var(t).
  const double var_min = variance_at(params, std::min(t, t_prime));
  return var_min * std::exp(-params.mu * std::fabs(t_prime - t));
}

double stationary_covariance(const ModelParams& params, double lag) {
  const auto [mean, var] = stationary_moments(params);
  (void)mean;
  if (!std::isfinite(lag)) throw ParameterError("lag must be finite");
  return var * std::exp(-params.mu * std::fabs(lag));
}

double burst_mean_at(const ModelParams& params, const MarkMoments& marks, double t) {
  marks.validate();
  return marks.mean * mean_at(params, t);
}

double burst_variance_at(const ModelParams& params, const MarkMoments& marks, double t) {
  marks.validate();
  return marks.second_moment() * variance_at(params, t);
}

double burst_retention_quotient(const ModelParams& params, const MarkMoments& marks) {
  marks.validate();
  return marks.mean * retention_quotient(params.lambda, params.mu);
}

MomentCurve moment_curve(const ModelParams& params, double horizon, double grid_step,
                         const MarkMoments* marks) {
  params.validate();
  const std::size_t n = grid_size(horizon, grid_step);
  MomentCurve curve;
  curve.grid.resize(n);
  curve.mean.resize(n);
  curve.variance.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * grid_step;
    curve.grid[j] = t;
    if (marks) {
      curve.mean[j] = burst_mean_at(params, *marks, t);
      curve.variance[j] = burst_variance_at(params, *marks, t);
    } else {
      curve.mean[j] = mean_at(params, t);
      curve.variance[j] = variance_at(params, t);
    }
  }
  return curve;
}

double retention_quotient(double lambda_hat, double mu) {
  if (!std::isfinite(lambda_hat) || lambda_hat < 0.0) {
    throw ParameterError("lambda_hat must be finite and >= 0");
  }
  if (!std::isfinite(mu) || mu < 0.0) throw ParameterError("mu must be finite and >= 0");
  if (mu == 0.0) throw DomainError("retention quotient is undefined for mu = 0");
  return lambda_hat / mu;
}

Classification classify(double srq, double mu) {
  if (!(srq >= 0.0)) throw ParameterError("srq must be >= 0");
  return {srq > 1.0 ? Verdict::happy : Verdict::unhappy, mu >= kFrustrationThreshold};
}

RetentionReport make_report(double lambda_hat, double mu) {
  const double srq = retention_quotient(lambda_hat, mu);
  const auto c = classify(srq, mu);
  return {lambda_hat, mu, srq, c.verdict, c.frustration_flag};
}

}  // namespace shotnoise
