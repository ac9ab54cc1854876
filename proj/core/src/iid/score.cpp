#include "abcmle/iid/score.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "abcmle/kernel.hpp"
#include "abcmle/observation.hpp"
#include "abcmle/smc/resampling.hpp"
#include "abcmle/streams.hpp"

namespace abcmle {

namespace {

void validate(const Model& model, const ParameterVector& theta,
              const IidScoreOptions& options) {
  if (model.state_dim() != 0) {
    std::ostringstream os;
    os << "model '" << model.name()
       << "' has a latent chain; the independent-observation estimator "
          "requires a model with no state dynamics";
    throw ConfigError(os.str());
  }
  if (options.sample_count < 2) {
    std::ostringstream os;
    os << "sample count must be at least 2, got " << options.sample_count;
    throw ConfigError(os.str());
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    std::ostringstream os;
    os.precision(17);
    os << "kernel scale epsilon must be positive and finite, got "
       << options.epsilon << "; there is no epsilon = 0 limit mode";
    throw ConfigError(os.str());
  }
  if (static_cast<int>(theta.size()) != model.theta_dim()) {
    std::ostringstream os;
    os << "parameter vector has " << theta.size() << " coordinates but model '"
       << model.name() << "' expects " << model.theta_dim();
    throw ConfigError(os.str());
  }
}

}  // namespace

ObservationScore iid_observation_score(const Model& model,
                                       const ParameterVector& theta,
                                       double value,
                                       const IidScoreOptions& options, Rng& rng,
                                       long step) {
  validate(model, theta, options);
  const int n = options.sample_count;
  const int dim_theta = model.theta_dim();
  const int dim_aux = model.aux_dim();
  const bool transformed =
      options.transform_observations.value_or(model.uses_observation_transform());
  const bool aux_dep = model.aux_depends_on_theta();
  std::vector<double> jacobian;
  if (options.coordinates == GradientCoordinates::Unconstrained) {
    jacobian = unconstrained_jacobian(theta);
  }

  const SmoothingKernel kernel(options.epsilon);
  std::vector<double> aux(static_cast<std::size_t>(dim_aux), 0.0);
  std::vector<double> grad_tau(static_cast<std::size_t>(dim_theta), 0.0);
  std::vector<double> grad_aux(static_cast<std::size_t>(dim_theta), 0.0);
  std::vector<double> log_weights(static_cast<std::size_t>(n), 0.0);
  std::vector<double> weights(static_cast<std::size_t>(n), 0.0);
  std::vector<double> terms(static_cast<std::size_t>(n) * dim_theta, 0.0);

  for (int i = 0; i < n; ++i) {
    model.sample_aux(theta, {}, aux, rng);
    const double raw = model.tau_with_grad(theta, {}, aux, grad_tau);
    if (!std::isfinite(raw)) {
      throw EvaluationError("observation map produced a non-finite value",
                            theta.values());
    }
    const double center = transformed ? bounded_transform(raw) : raw;
    log_weights[i] = kernel.log_density(value, center);
    const double scale = kernel.dlog_dcenter(value, center) *
                         (transformed ? bounded_transform_derivative(raw) : 1.0);
    double* row = terms.data() + static_cast<std::size_t>(i) * dim_theta;
    for (int k = 0; k < dim_theta; ++k) row[k] = scale * grad_tau[k];
    if (aux_dep) {
      model.grad_log_aux(theta, {}, aux, grad_aux);
      for (int k = 0; k < dim_theta; ++k) row[k] += grad_aux[k];
    }
    if (!jacobian.empty()) {
      for (int k = 0; k < dim_theta; ++k) row[k] *= jacobian[k];
    }
  }

  const double log_norm = log_sum_exp(log_weights);
  if (log_norm == -std::numeric_limits<double>::infinity()) {
    throw DegeneracyError(step, options.epsilon, theta.values());
  }
  if (!std::isfinite(log_norm)) {
    throw EvaluationError("importance weights are non-finite", theta.values());
  }
  normalize_from_log(log_weights, log_norm, weights);

  ObservationScore result;
  result.log_density =
      log_norm - std::log(static_cast<double>(n));
  result.ess = effective_sample_size(weights);
  result.score.assign(static_cast<std::size_t>(dim_theta), 0.0);
  for (int i = 0; i < n; ++i) {
    const double w = weights[i];
    const double* row = terms.data() + static_cast<std::size_t>(i) * dim_theta;
    for (int k = 0; k < dim_theta; ++k) result.score[k] += w * row[k];
  }
  check_finite(result.score, "observation score estimate", theta.values());
  return result;
}

IidScoreResult iid_score_series(const Model& model, const ParameterVector& theta,
                                std::span<const double> values,
                                const IidScoreOptions& options,
                                std::uint64_t seed) {
  validate(model, theta, options);
  IidScoreResult result;
  result.score.values.assign(theta.size(), 0.0);
  result.score.coordinates = options.coordinates;
  result.min_ess = static_cast<double>(options.sample_count);
  for (std::size_t t = 0; t < values.size(); ++t) {
    Rng rng = Rng::keyed(seed, kStreamObservation, t + 1);
    const ObservationScore obs = iid_observation_score(
        model, theta, values[t], options, rng, static_cast<long>(t + 1));
    result.log_likelihood += obs.log_density;
    for (std::size_t k = 0; k < theta.size(); ++k)
      result.score.values[k] += obs.score[k];
    if (obs.ess < result.min_ess) result.min_ess = obs.ess;
  }
  return result;
}

std::vector<GradientVector> gradient_histogram(const Model& model,
                                               const ParameterVector& theta,
                                               std::span<const double> raw,
                                               const IidScoreOptions& options,
                                               std::uint64_t seed) {
  if (raw.empty()) {
    throw ConfigError("gradient histogram requires at least one observation");
  }
  validate(model, theta, options);
  const bool transformed =
      options.transform_observations.value_or(model.uses_observation_transform());
  const NoisySeries series = corrupt_observations(
      raw, options.epsilon, transformed, derive_seed(seed, kStreamNoise));
  std::vector<GradientVector> out;
  out.reserve(raw.size());
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    Rng rng = Rng::keyed(seed, kStreamObservation, t + 1);
    ObservationScore obs = iid_observation_score(
        model, theta, series.values[t], options, rng, static_cast<long>(t + 1));
    out.push_back(GradientVector{std::move(obs.score), options.coordinates});
  }
  return out;
}

}  // namespace abcmle
