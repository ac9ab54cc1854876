#pragma once

#include <cstddef>
#include <vector>

namespace abcmle {

// Robbins-Monro step-size schedule: gamma_j = a * (j + t0)^(-b) for j >= 1.
// With b in (0.5, 1] the steps sum to infinity while their squares stay
// summable, the classical conditions for stochastic-approximation
// convergence. a = 0 is allowed and freezes the parameters (used to replay
// likelihood traces at a fixed point). Per-coordinate multipliers rescale
// the step for individual coordinates; empty means all ones.
struct StepSchedule {
  double a = 0.1;
  double b = 0.6;
  long t0 = 0;
  std::vector<double> multipliers;

  double gamma(long j) const;
  double multiplier(std::size_t k) const {
    return multipliers.empty() ? 1.0 : multipliers[k];
  }
};

// Throws ConfigError unless a >= 0, b in (0.5, 1], t0 >= 0, and multipliers
// (when present) have exactly `dim` strictly positive finite entries.
void validate_schedule(const StepSchedule& schedule, std::size_t dim);

}  // namespace abcmle
