#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "abcmle/gradient.hpp"
#include "abcmle/mle/run_record.hpp"
#include "abcmle/mle/schedule.hpp"
#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"
#include "abcmle/smc/particle_filter.hpp"

namespace abcmle {

struct AscentOptions {
  double epsilon = 0.1;
  int particle_count = 1000;
  // Score estimator for batch passes over latent-chain models. The online
  // driver always uses the marginal (mixture) accumulators for latent-chain
  // models and the per-observation estimator for models without one.
  ScoreMethod score_method = ScoreMethod::PathSpace;
  StepSchedule schedule;
  long iterations = 1000;  // batch passes; ignored by the online driver
  // The reported estimate is the average of the parameters over this many
  // trailing updates (clamped to the number performed).
  long average_last = 1000;
  // Per-coordinate updates are clipped to clip_factor * gamma_j * multiplier;
  // heavy-tailed score estimates otherwise throw early iterates far out.
  double clip_factor = 10.0;
  std::optional<bool> transform_observations{};
  bool record_timing = false;
  // Record every record_stride-th update in the RunRecord (the last update
  // is always recorded). Tail averaging is unaffected by thinning.
  long record_stride = 1;
};

// Optional replacement for the score estimate in the batch driver: called as
// provider(theta, pass_index) and expected to return the full-data score at
// theta. Either coordinate system is accepted; natural-coordinate gradients
// are converted through the bijection jacobian before the update. Used to
// drive the optimizer with an exact score in oracle tests.
using ScoreProvider =
    std::function<GradientVector(const ParameterVector&, long)>;

// Gradient ascent with one full-data score estimate per iteration, stepping
// in unconstrained coordinates:
//   v_j = v_{j-1} + gamma_j * score(theta_{j-1}),  theta_j = bijection(v_j).
// Pass j draws from the substream keyed by (seed, kStreamFilter, j).
RunRecord batch_gradient_ascent(const Model& model,
                                const ParameterVector& theta0,
                                std::span<const double> values,
                                const AscentOptions& options,
                                std::uint64_t seed,
                                ScoreProvider score_override = {});

// Stochastic (online) gradient ascent: one update per observation, driven by
// the increment of the running score estimate along the parameter
// trajectory. Latent-chain models maintain a single particle system with
// marginal accumulators for the whole stream; models without a latent chain
// score each observation independently. Uses the substream keyed by
// (seed, kStreamFilter, 1), so a frozen schedule (a = 0) replays batch
// pass 1 exactly.
RunRecord online_gradient_ascent(const Model& model,
                                 const ParameterVector& theta0,
                                 std::span<const double> values,
                                 const AscentOptions& options,
                                 std::uint64_t seed);

}  // namespace abcmle
