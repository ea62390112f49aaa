#include "shotnoise/poisson_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shotnoise/errors.hpp"

namespace shotnoise {

namespace {

void require_horizon(double horizon) {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw ParameterError("horizon must be finite and > 0, got " + std::to_string(horizon));
  }
}

std::uint64_t poisson_inversion(double mean, Rng& rng) {
  // Sequential search on the cdf; mean <= kInversionLimit keeps exp(-mean)
  // well above underflow.
  for (;;) {
    const double u = rng.uniform01();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    if (k < 1000) return k;
    // cdf stalled below u through rounding; redraw
  }
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::uint64_t poisson_ptrs(double mean, Rng& rng) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -mean + k * log_mean - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

// log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer n >= 1.
double stirling_error(double n) {
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.91893853320467274178;
  }
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680, s4 = 1.0 / 1188;
  const double nn = n * n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / m) + m - x without cancellation when x is close to m.
double deviance_term(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw ParameterError("lambda must be finite and > 0, got " + std::to_string(lambda));
  }
  if (!std::isfinite(mu) || mu < 0.0) {
    throw ParameterError("mu must be finite and >= 0, got " + std::to_string(mu));
  }
}

ArrivalSequence ArrivalSequence::from_times(double horizon, std::vector<double> times) {
  require_horizon(horizon);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!(t > 0.0 && t < horizon)) {
      throw ParameterError("event time " + std::to_string(t) + " outside (0, horizon)");
    }
    if (i > 0 && !(times[i - 1] < t)) {
      throw ParameterError("event times must be strictly increasing");
    }
  }
  return ArrivalSequence(horizon, std::move(times));
}

void IntervalCountExperiment::validate() const {
  if (alpha == 0) throw ParameterError("alpha must be a positive integer");
  require_horizon(horizon);
  if (!std::isfinite(k) || !std::isfinite(l) || !(0.0 <= k && k < l && l <= horizon)) {
    throw ParameterError("interval must satisfy 0 <= k < l <= horizon");
  }
}

std::uint64_t sample_poisson(double mean, Rng& rng) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw ParameterError("poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  return mean <= kInversionLimit ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

std::uint64_t sample_count(const ModelParams& params, double horizon, Rng& rng) {
  params.validate();
  require_horizon(horizon);
  return sample_poisson(params.lambda * horizon, rng);
}

ArrivalSequence sample_arrivals(std::size_t count, double horizon, Rng& rng) {
  require_horizon(horizon);

  auto draw = [&] {
    for (;;) {
      const double t = rng.uniform01() * horizon;
      if (t > 0.0 && t < horizon) return t;
    }
  };

  std::vector<double> times(count);
  for (auto& t : times) t = draw();
  std::sort(times.begin(), times.end());

  // Exact ties: redraw the later duplicate until the order is strict.
  for (;;) {
    bool redrawn = false;
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (times[i] == times[i - 1]) {
        times[i] = draw();
        redrawn = true;
      }
    }
    if (!redrawn) break;
    std::sort(times.begin(), times.end());
  }
  return ArrivalSequence(horizon, std::move(times));
}

std::size_t count_in_interval(const ArrivalSequence& arrivals, double k, double l) {
  if (!std::isfinite(k) || !std::isfinite(l) || !(0.0 <= k && k < l && l <= arrivals.horizon())) {
    throw ParameterError("interval must satisfy 0 <= k < l <= horizon");
  }
  const auto& times = arrivals.times();
  const auto first = std::upper_bound(times.begin(), times.end(), k);
  const auto last = std::upper_bound(times.begin(), times.end(), l);
  return static_cast<std::size_t>(last - first);
}

double binomial_count_pmf(const IntervalCountExperiment& exp, std::size_t r) {
  exp.validate();
  if (r > exp.alpha) {
    throw ParameterError("r must lie in [0, alpha]");
  }
  const double p = exp.p();
  const double q = 1.0 - p;
  const auto n = static_cast<double>(exp.alpha);
  const auto x = static_cast<double>(r);
  if (p >= 1.0) return r == exp.alpha ? 1.0 : 0.0;
  // Loader's saddle-point form: relative accuracy near machine precision
  // even where lgamma differences would cancel badly.
  if (r == 0) return std::exp(n * std::log1p(-p));
  if (r == exp.alpha) return std::exp(n * std::log(p));
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) - deviance_term(x, n * p) -
                    deviance_term(n - x, n * q);
  const double lf = 1.83787706640934548356 + std::log(x) + std::log1p(-x / n);  // log(2 pi x (n-x)/n)
  return std::exp(lc - 0.5 * lf);
}

double poisson_limit_pmf(double beta, std::size_t r) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ParameterError("beta must be finite and > 0");
  }
  if (r == 0) return std::exp(-beta);
  const auto x = static_cast<double>(r);
  return std::exp(-stirling_error(x) - deviance_term(x, beta)) / std::sqrt(6.28318530717958647693 * x);
}

}  // namespace shotnoise
