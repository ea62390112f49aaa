#pragma once

// Elementary (homogeneous Poisson) flow of favorable-information events.
//
// Arrivals on (0, T) are generated through the conditional-uniform
// representation: draw the total count from Poisson(lambda * T), then place
// that many i.i.d. Uniform(0, T) instants. The same construction backs the
// interval-count experiment, whose binomial law tends to the Poisson law as
// the number of points grows with fixed density.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shotnoise/random.hpp"

namespace shotnoise {

struct ModelParams {
  double lambda;  // event rate, 1/s, > 0
  double mu;      // satisfaction decay rate, 1/s, >= 0 (0 = no decay)

  // Throws ParameterError unless lambda > 0, mu >= 0 and both are finite.
  void validate() const;
};

class ArrivalSequence {
 public:
  ArrivalSequence() = default;

  // Validates 0 < t_i < horizon and strict ordering.
  static ArrivalSequence from_times(double horizon, std::vector<double> times);

  double horizon() const noexcept { return horizon_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t count() const noexcept { return times_.size(); }

 private:
  ArrivalSequence(double horizon, std::vector<double> times)
      : horizon_(horizon), times_(std::move(times)) {}
  friend ArrivalSequence sample_arrivals(std::size_t, double, Rng&);

  double horizon_ = 0.0;
  std::vector<double> times_;
};

struct IntervalCountExperiment {
  std::size_t alpha;  // number of uniform points
  double horizon;     // T
  double k;           // interval start
  double l;           // interval end

  void validate() const;
  // Probability that a single uniform point lands in (k, l].
  double p() const { return (l - k) / horizon; }
};

// Poisson draw with mean lambda * horizon. Inversion for small means,
// transformed rejection (PTRS) above `kInversionLimit`.
std::uint64_t sample_count(const ModelParams& params, double horizon, Rng& rng);

// Poisson draw with an explicit mean (>= 0).
std::uint64_t sample_poisson(double mean, Rng& rng);

inline constexpr double kInversionLimit = 30.0;

// `count` i.i.d. Uniform(0, horizon) instants, sorted, strictly increasing.
ArrivalSequence sample_arrivals(std::size_t count, double horizon, Rng& rng);

// Number of events in the half-open interval (k, l].
std::size_t count_in_interval(const ArrivalSequence& arrivals, double k, double l);

double binomial_count_pmf(const IntervalCountExperiment& exp, std::size_t r);

double poisson_limit_pmf(double beta, std::size_t r);

}  // namespace shotnoise
