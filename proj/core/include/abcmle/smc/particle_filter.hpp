#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abcmle/gradient.hpp"
#include "abcmle/kernel.hpp"
#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"
#include "abcmle/rng.hpp"

namespace abcmle {

// How the running score (log-likelihood gradient) is estimated.
//  - PathSpace: each particle carries the accumulated gradient of its own
//    trajectory; accumulators follow lineages through resampling. O(N) per
//    step, but the estimator variance grows quadratically in time.
//  - Marginal: each particle carries an expectation of the path gradient
//    given its current state, updated through an O(N^2) mixture over the
//    previous weighted particle system. Linear variance growth in time.
enum class ScoreMethod { PathSpace, Marginal };

struct FilterOptions {
  double epsilon = 0.1;
  int particle_count = 1000;
  ScoreMethod score_method = ScoreMethod::PathSpace;
  // Gradient accumulation can be skipped entirely for likelihood-only or
  // calibration passes (no tau derivatives are evaluated then).
  bool compute_score = true;
  // Report gradients in natural coordinates or multiplied through the
  // bijection jacobian used by the optimizers.
  GradientCoordinates score_coordinates = GradientCoordinates::Natural;
  // Override the model's default observation-side transform choice
  // (used when fitting data that was deliberately left untransformed).
  std::optional<bool> transform_observations{};
  // Resample whenever ESS <= fraction * N. The default resamples every step,
  // which keeps the likelihood estimate in its simplest unbiased form.
  double resample_ess_fraction = 1.0;
  // Testing hook: force the generic pairwise mixture in the Marginal method
  // even when the model has no latent chain (the collapsed shortcut and the
  // generic path must produce identical numbers in that case).
  bool force_generic_mixture = false;
};

struct StepSummary {
  double log_likelihood_increment = 0.0;
  // Predictive probability of observing a value <= the one just seen,
  // under the smoothed observation density mixture. Uniform on [0,1] when
  // the model, parameters, and smoothing scale match the data generator.
  double conditional_cdf = 0.0;
  double ess = 0.0;
  bool resampled = false;
};

// Bootstrap particle filter for the smoothed-observation state-space model:
// latent states move under the model's transition kernel, auxiliary variables
// are drawn fresh each step, and each particle is weighted by a Gaussian
// kernel of width epsilon around its simulated observation feature.
//
// Models with no latent chain (state_dim() == 0) degenerate to importance
// sampling with i.i.d. proposals per step; both score methods remain valid
// and the Marginal mixture collapses to an O(N) update.
class ParticleFilter {
 public:
  ParticleFilter(const Model& model, ParameterVector theta,
                 const FilterOptions& options, std::uint64_t seed);

  // Advance one observation. `value` must already be on the scale the filter
  // compares against (corrupted and/or transformed upstream as configured).
  StepSummary step(double value);

  // Replace parameters between steps (online estimation). Values must lie in
  // the model's domain.
  void set_theta(const ParameterVector& theta);

  const ParameterVector& theta() const { return theta_; }
  long step_index() const { return step_index_; }
  double log_likelihood() const { return log_likelihood_; }

  // Weighted average of per-particle gradient accumulators: the running
  // estimate of the gradient of the log-likelihood of all observations seen
  // so far, in the coordinates requested at construction.
  GradientVector total_score() const;

  double last_ess() const { return last_ess_; }
  std::span<const double> states() const { return states_; }
  std::span<const double> weights() const { return weights_; }

 private:
  void initialize_particles();
  void propagate();
  void accumulate_path_scores();
  void accumulate_marginal_scores();
  void resample();
  // Multiplies a per-step gradient term by the parameter-bijection jacobian
  // when unconstrained coordinates were requested; identity otherwise.
  void to_output_coordinates(std::span<double> grad) const;

  const Model& model_;
  ParameterVector theta_;
  FilterOptions options_;
  Rng rng_;

  int n_ = 0;
  int state_dim_ = 0;
  int aux_dim_ = 0;
  int dim_theta_ = 0;
  bool transformed_ = false;
  long step_index_ = 0;
  double log_likelihood_ = 0.0;
  double last_ess_ = 0.0;

  std::vector<double> jacobian_;  // d theta / d v at current theta

  std::vector<double> states_;        // n_ x state_dim_
  std::vector<double> parent_states_; // states each particle was moved from
  std::vector<double> aux_;           // n_ x aux_dim_
  std::vector<double> centers_;       // simulated observation features
  std::vector<double> log_weights_;
  std::vector<double> weights_;       // normalized posterior weights
  std::vector<double> incoming_;      // normalized weights entering the step
  bool incoming_uniform_ = true;

  std::vector<double> scores_;        // n_ x dim_theta_ accumulators
  std::vector<double> scratch_scores_;
  std::vector<double> grad_obs_;      // per-particle observation gradient
  std::vector<double> total_score_;   // cached weighted accumulator average
  // Previous weighted system, kept across the resampling step for the
  // Marginal mixture update.
  std::vector<double> prev_states_;
  std::vector<double> prev_weights_;
  std::vector<double> prev_scores_;

  std::vector<std::uint32_t> ancestors_;
  std::vector<double> gather_;
};

// Runs a fresh filter over a whole series and returns the total
// log-likelihood. Returns 0 for an empty series. Score accumulation is
// disabled, so this is the cheapest full-likelihood evaluation.
double estimate_log_likelihood(const Model& model, const ParameterVector& theta,
                               std::span<const double> values, double epsilon,
                               int particle_count, std::uint64_t seed,
                               std::optional<bool> transform_observations = {});

// One full filtering pass collecting the per-step diagnostics alongside the
// final likelihood and score.
struct FilterRunResult {
  double log_likelihood = 0.0;
  GradientVector score;
  std::vector<double> step_log_likelihood;
  std::vector<double> step_ess;
  std::vector<double> conditional_cdfs;
};

FilterRunResult run_filter(const Model& model, const ParameterVector& theta,
                           std::span<const double> values,
                           const FilterOptions& options, std::uint64_t seed);

}  // namespace abcmle
