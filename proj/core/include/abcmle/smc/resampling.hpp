#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abcmle/rng.hpp"

namespace abcmle {

// max + log(sum exp(x - max)); -inf for an all--inf input. The standard
// overflow-safe reduction used for all weight arithmetic.
double log_sum_exp(std::span<const double> log_values);

// weights[i] = exp(log_weights[i] - log_norm) given log_norm =
// log_sum_exp(log_weights); the result sums to 1 up to rounding.
void normalize_from_log(std::span<const double> log_weights, double log_norm,
                        std::span<double> weights);

// 1 / sum(W^2) for normalized weights; ranges over [1, N].
double effective_sample_size(std::span<const double> weights);

// Systematic resampling: one uniform draw places N evenly spaced points on
// the cumulative weight profile. ancestors[k] is the index the k-th offspring
// copies; every particle's offspring count differs from N*W[i] by less than
// one. Weights must be normalized.
void systematic_resample(std::span<const double> weights, Rng& rng,
                         std::span<std::uint32_t> ancestors);

std::vector<std::uint32_t> systematic_resample(std::span<const double> weights,
                                               Rng& rng);

}  // namespace abcmle
