#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abcmle/gradient.hpp"
#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"
#include "abcmle/rng.hpp"

namespace abcmle {

// Settings for the per-observation importance-sampling estimator used by
// models without a latent chain.
struct IidScoreOptions {
  double epsilon = 0.1;
  int sample_count = 1000;  // auxiliary draws per observation
  GradientCoordinates coordinates = GradientCoordinates::Natural;
  std::optional<bool> transform_observations{};
};

struct ObservationScore {
  double log_density = 0.0;  // log of the kernel-density estimate at value
  double ess = 0.0;          // effective sample size of the weights
  std::vector<double> score; // self-normalized score estimate
};

// Score of one smoothed observation: draw sample_count fresh auxiliary
// variables, weight each by the Gaussian kernel around its simulated
// observation feature, and return the self-normalized average of the
// per-draw gradient terms. `step` only labels error messages.
ObservationScore iid_observation_score(const Model& model,
                                       const ParameterVector& theta,
                                       double value,
                                       const IidScoreOptions& options, Rng& rng,
                                       long step = 1);

struct IidScoreResult {
  double log_likelihood = 0.0;
  GradientVector score;      // sum of per-observation scores
  double min_ess = 0.0;      // worst per-observation ESS in the series
};

// Full-series likelihood and score: observation t (1-based) draws from the
// substream keyed by (seed, kStreamObservation, t), so each observation's
// estimate is independent of its position and of the series length.
IidScoreResult iid_score_series(const Model& model, const ParameterVector& theta,
                                std::span<const double> values,
                                const IidScoreOptions& options,
                                std::uint64_t seed);

// Per-observation score estimates for a raw series: corrupt the series once
// (noise substream, one realisation of the additive kernel noise), then
// estimate every observation's score independently. One gradient vector per
// observation, ready for histogram emission.
std::vector<GradientVector> gradient_histogram(const Model& model,
                                               const ParameterVector& theta,
                                               std::span<const double> raw,
                                               const IidScoreOptions& options,
                                               std::uint64_t seed);

}  // namespace abcmle
