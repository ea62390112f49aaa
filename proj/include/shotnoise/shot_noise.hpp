#pragma once

// Shot-noise evaluation: every event contributes a jump (unit, or its mark)
// that then decays as exp(-mu * (t - event_time)).

#include <cstddef>
#include <span>
#include <vector>

#include "shotnoise/poisson_flow.hpp"
#include "shotnoise/random.hpp"

namespace shotnoise {

inline constexpr double kDefaultGridStep = 1.0;

// Satisfaction path sampled on the uniform grid 0, step, 2*step, ...
struct Trajectory {
  double step = kDefaultGridStep;
  std::vector<double> grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

struct MarkMoments {
  double mean;      // m_R
  double variance;  // Var_R

  void validate() const;
  double second_moment() const { return variance + mean * mean; }
};

// Law of the per-event jump size (number of information pieces per burst).
class MarkDistribution {
 public:
  enum class Kind { constant, geometric, empirical };

  static MarkDistribution constant(double value);
  // Support {1, 2, ...}, P(R = k) = p (1 - p)^(k - 1).
  static MarkDistribution geometric(double success_probability);
  // Uniform resampling of observed mark values.
  static MarkDistribution empirical(std::vector<double> observed);

  Kind kind() const noexcept { return kind_; }
  const MarkMoments& moments() const noexcept { return moments_; }
  double mean() const noexcept { return moments_.mean; }
  double variance() const noexcept { return moments_.variance; }

  // Kind-specific parameter: the value (constant) or p (geometric).
  double parameter() const noexcept { return parameter_; }
  const std::vector<double>& observed() const noexcept { return observed_; }

  double sample(Rng& rng) const;

 private:
  MarkDistribution(Kind kind, double parameter, std::vector<double> observed, MarkMoments m)
      : kind_(kind), parameter_(parameter), observed_(std::move(observed)), moments_(m) {}

  Kind kind_;
  double parameter_;
  std::vector<double> observed_;
  MarkMoments moments_;
};

// 1(t - event_time) * exp(-mu * (t - event_time)).
double kernel_response(double t, double event_time, double mu);

// Number of grid points covering [0, horizon] with the given step.
std::size_t grid_size(double horizon, double grid_step);

Trajectory evaluate_trajectory(const ArrivalSequence& arrivals, double mu,
                               double grid_step = kDefaultGridStep);

Trajectory evaluate_trajectory_marked(const ArrivalSequence& arrivals, std::span<const double> marks,
                                      double mu, double grid_step = kDefaultGridStep);

// Lower-level form for event lists that need not satisfy ArrivalSequence's
// strict-interior invariant (session logs allow ties and t == horizon).
// `times` must be nondecreasing and lie in [0, horizon].
Trajectory evaluate_events(std::span<const double> times, std::span<const double> marks,
                           double mu, double horizon, double grid_step);

std::vector<double> sample_marks(const MarkDistribution& dist, std::size_t count, Rng& rng);

}  // namespace shotnoise
