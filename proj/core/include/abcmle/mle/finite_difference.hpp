#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "abcmle/gradient.hpp"
#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"

namespace abcmle {

// Central-difference gradient of an arbitrary scalar function of the
// parameters, perturbing one natural coordinate at a time:
//   (f(theta + delta e_k) - f(theta - delta e_k)) / (2 delta).
// Perturbed points must stay inside the parameter domain; pick interior
// evaluation points with margin larger than delta.
std::vector<double> finite_difference_gradient(
    const std::function<double(const ParameterVector&)>& f,
    const ParameterVector& theta, double delta);

// Central differences of the particle-filter log-likelihood with common
// random numbers: both evaluations of each coordinate pair reuse the same
// seed, so the Monte Carlo noise largely cancels and the result estimates
// the same score the filter's gradient accumulators do (natural
// coordinates).
GradientVector finite_difference_score(
    const Model& model, const ParameterVector& theta,
    std::span<const double> values, double epsilon, int particle_count,
    double delta, std::uint64_t seed,
    std::optional<bool> transform_observations = {});

}  // namespace abcmle
