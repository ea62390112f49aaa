#include "shotnoise/shot_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shotnoise/errors.hpp"

namespace shotnoise {

namespace {

void require_decay(double mu) {
  if (!std::isfinite(mu) || mu < 0.0) throw ParameterError("mu must be finite and >= 0");
}

}  // namespace

void MarkMoments::validate() const {
  if (!std::isfinite(mean) || mean <= 0.0) throw ParameterError("mark mean must be finite and > 0");
  if (!std::isfinite(variance) || variance < 0.0) {
    throw ParameterError("mark variance must be finite and >= 0");
  }
}

MarkDistribution MarkDistribution::constant(double value) {
  if (!std::isfinite(value) || value <= 0.0) throw ParameterError("constant mark must be finite and > 0");
  return MarkDistribution(Kind::constant, value, {}, MarkMoments{value, 0.0});
}

MarkDistribution MarkDistribution::geometric(double success_probability) {
  const double p = success_probability;
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
    throw ParameterError("geometric success probability must lie in (0, 1]");
  }
  return MarkDistribution(Kind::geometric, p, {}, MarkMoments{1.0 / p, (1.0 - p) / (p * p)});
}

MarkDistribution MarkDistribution::empirical(std::vector<double> observed) {
  if (observed.empty()) throw ParameterError("empirical mark distribution needs at least one value");
  for (double v : observed) {
    if (!std::isfinite(v) || v <= 0.0) throw ParameterError("empirical marks must be finite and > 0");
  }
  const auto n = static_cast<double>(observed.size());
  const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : observed) ss += (v - mean) * (v - mean);
  return MarkDistribution(Kind::empirical, 0.0, std::move(observed), MarkMoments{mean, ss / n});
}

double MarkDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::constant:
      return parameter_;
    case Kind::geometric: {
      if (parameter_ >= 1.0) return 1.0;
      // Inversion: smallest k >= 1 with 1 - (1-p)^k >= 1 - u.
      const double k = std::ceil(std::log(rng.uniform01()) / std::log1p(-parameter_));
      return std::max(1.0, k);
    }
    case Kind::empirical: {
      const auto n = observed_.size();
      auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
      return observed_[std::min(idx, n - 1)];
    }
  }
  return parameter_;
}

double kernel_response(double t, double event_time, double mu) {
  if (!std::isfinite(t) || t < 0.0) throw ParameterError("t must be finite and >= 0");
  if (!std::isfinite(event_time) || event_time < 0.0) {
    throw ParameterError("event_time must be finite and >= 0");
  }
  require_decay(mu);
  if (t < event_time) return 0.0;
  return std::exp(-mu * (t - event_time));
}

std::size_t grid_size(double horizon, double grid_step) {
  if (!std::isfinite(grid_step) || grid_step <= 0.0) {
    throw ParameterError("grid_step must be finite and > 0");
  }
  if (!std::isfinite(horizon) || horizon <= 0.0) throw ParameterError("horizon must be finite and > 0");
  // Tolerate horizon/step landing a hair below an integer.
  const double cells = std::floor(horizon / grid_step * (1.0 + 1e-12));
  if (cells < 1.0) throw ParameterError("grid_step must not exceed the horizon");
  return static_cast<std::size_t>(cells) + 1;
}

Trajectory evaluate_events(std::span<const double> times, std::span<const double> marks, double mu,
                           double horizon, double grid_step) {
  require_decay(mu);
  if (times.size() != marks.size()) {
    throw ParameterError("marks length " + std::to_string(marks.size()) + " != event count " +
                         std::to_string(times.size()));
  }
  const std::size_t n = grid_size(horizon, grid_step);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= horizon) || (i > 0 && times[i] < times[i - 1])) {
      throw ParameterError("event times must be nondecreasing within [0, horizon]");
    }
  }

  Trajectory out;
  out.step = grid_step;
  out.grid.resize(n);
  out.values.resize(n);

  // X(t + step) = X(t) e^{-mu step} + sum of jumps in (t, t + step], each
  // decayed from its own event time to the grid instant.
  const double cell_decay = std::exp(-mu * grid_step);
  double x = 0.0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * grid_step;
    if (j > 0) x *= cell_decay;
    while (next < times.size() && times[next] <= t) {
      x += marks[next] * std::exp(-mu * (t - times[next]));
      ++next;
    }
    out.grid[j] = t;
    out.values[j] = x;
  }
  return out;
}

Trajectory evaluate_trajectory(const ArrivalSequence& arrivals, double mu, double grid_step) {
  const std::vector<double> unit(arrivals.count(), 1.0);
  return evaluate_events(arrivals.times(), unit, mu, arrivals.horizon(), grid_step);
}

Trajectory evaluate_trajectory_marked(const ArrivalSequence& arrivals, std::span<const double> marks,
                                      double mu, double grid_step) {
  for (double m : marks) {
    if (!std::isfinite(m) || m <= 0.0) throw ParameterError("marks must be finite and > 0");
  }
  return evaluate_events(arrivals.times(), marks, mu, arrivals.horizon(), grid_step);
}

std::vector<double> sample_marks(const MarkDistribution& dist, std::size_t count, Rng& rng) {
  std::vector<double> out(count);
  for (auto& m : out) m = dist.sample(rng);
  return out;
}

}  // namespace shotnoise
