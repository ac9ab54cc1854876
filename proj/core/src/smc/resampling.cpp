#include "abcmle/smc/resampling.hpp"

#include <cmath>
#include <limits>

namespace abcmle {

double log_sum_exp(std::span<const double> log_values) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : log_values) {
    if (v > max) max = v;
  }
  if (!std::isfinite(max)) return max;  // all -inf (or empty)
  double sum = 0.0;
  for (double v : log_values) sum += std::exp(v - max);
  return max + std::log(sum);
}

void normalize_from_log(std::span<const double> log_weights, double log_norm,
                        std::span<double> weights) {
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    weights[i] = std::exp(log_weights[i] - log_norm);
  }
}

double effective_sample_size(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  return 1.0 / sum_sq;
}

void systematic_resample(std::span<const double> weights, Rng& rng,
                         std::span<std::uint32_t> ancestors) {
  const std::size_t n = weights.size();
  const double u = rng.uniform();
  std::size_t i = 0;
  double cumulative = weights[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double position = (static_cast<double>(k) + u) / static_cast<double>(n);
    while (cumulative < position && i + 1 < n) {
      ++i;
      cumulative += weights[i];
    }
    ancestors[k] = static_cast<std::uint32_t>(i);
  }
}

std::vector<std::uint32_t> systematic_resample(std::span<const double> weights,
                                               Rng& rng) {
  std::vector<std::uint32_t> ancestors(weights.size());
  systematic_resample(weights, rng, ancestors);
  return ancestors;
}

}  // namespace abcmle
