#include "abcmle/smc/particle_filter.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <utility>

#include "abcmle/observation.hpp"
#include "abcmle/smc/resampling.hpp"

namespace abcmle {

namespace {

void validate_options(const FilterOptions& options) {
  if (options.particle_count < 2) {
    std::ostringstream os;
    os << "particle count must be at least 2, got " << options.particle_count;
    throw ConfigError(os.str());
  }
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
    std::ostringstream os;
    os.precision(17);
    os << "kernel scale epsilon must be positive and finite, got "
       << options.epsilon << "; there is no epsilon = 0 limit mode";
    throw ConfigError(os.str());
  }
  if (!(options.resample_ess_fraction > 0.0) ||
      options.resample_ess_fraction > 1.0) {
    std::ostringstream os;
    os << "resample ESS fraction must lie in (0, 1], got "
       << options.resample_ess_fraction;
    throw ConfigError(os.str());
  }
}

}  // namespace

ParticleFilter::ParticleFilter(const Model& model, ParameterVector theta,
                               const FilterOptions& options, std::uint64_t seed)
    : model_(model),
      theta_(std::move(theta)),
      options_(options),
      rng_(seed),
      n_(options.particle_count),
      state_dim_(model.state_dim()),
      aux_dim_(model.aux_dim()),
      dim_theta_(model.theta_dim()) {
  validate_options(options_);
  if (static_cast<int>(theta_.size()) != dim_theta_) {
    std::ostringstream os;
    os << "parameter vector has " << theta_.size() << " coordinates but model '"
       << model_.name() << "' expects " << dim_theta_;
    throw ConfigError(os.str());
  }
  transformed_ =
      options_.transform_observations.value_or(model_.uses_observation_transform());

  const std::size_t n = static_cast<std::size_t>(n_);
  states_.assign(n * static_cast<std::size_t>(state_dim_), 0.0);
  parent_states_.assign(states_.size(), 0.0);
  aux_.assign(n * static_cast<std::size_t>(aux_dim_), 0.0);
  centers_.assign(n, 0.0);
  log_weights_.assign(n, 0.0);
  weights_.assign(n, 1.0 / static_cast<double>(n_));
  incoming_.assign(n, 0.0);
  if (options_.compute_score) {
    scores_.assign(n * static_cast<std::size_t>(dim_theta_), 0.0);
    grad_obs_.assign(scores_.size(), 0.0);
    if (options_.score_method == ScoreMethod::PathSpace) {
      scratch_scores_.assign(scores_.size(), 0.0);
    } else {
      prev_states_.assign(states_.size(), 0.0);
      prev_weights_.assign(n, 0.0);
      prev_scores_.assign(scores_.size(), 0.0);
    }
  }
  total_score_.assign(static_cast<std::size_t>(dim_theta_), 0.0);
  ancestors_.assign(n, 0);
  if (options_.score_coordinates == GradientCoordinates::Unconstrained) {
    jacobian_ = unconstrained_jacobian(theta_);
  }
  last_ess_ = static_cast<double>(n_);
  initialize_particles();
}

void ParticleFilter::initialize_particles() {
  for (int i = 0; i < n_; ++i) {
    const std::span<double> x{states_.data() + static_cast<std::size_t>(i) * state_dim_,
                              static_cast<std::size_t>(state_dim_)};
    const std::span<double> u{aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
                              static_cast<std::size_t>(aux_dim_)};
    if (state_dim_ > 0) model_.sample_initial(theta_, x, rng_);
    model_.sample_aux(theta_, x, u, rng_);
  }
}

void ParticleFilter::set_theta(const ParameterVector& theta) {
  if (theta.size() != theta_.size()) {
    std::ostringstream os;
    os << "parameter vector has " << theta.size() << " coordinates but model '"
       << model_.name() << "' expects " << theta_.size();
    throw ConfigError(os.str());
  }
  theta_ = theta;
  if (options_.score_coordinates == GradientCoordinates::Unconstrained) {
    jacobian_ = unconstrained_jacobian(theta_);
  }
}

void ParticleFilter::to_output_coordinates(std::span<double> grad) const {
  if (options_.score_coordinates == GradientCoordinates::Unconstrained) {
    for (int k = 0; k < dim_theta_; ++k) grad[k] *= jacobian_[k];
  }
}

void ParticleFilter::propagate() {
  if (state_dim_ > 0) {
    parent_states_.swap(states_);
    for (int i = 0; i < n_; ++i) {
      const std::size_t off = static_cast<std::size_t>(i) * state_dim_;
      const std::span<const double> parent{parent_states_.data() + off,
                                           static_cast<std::size_t>(state_dim_)};
      const std::span<double> x{states_.data() + off,
                                static_cast<std::size_t>(state_dim_)};
      model_.sample_transition(theta_, parent, x, rng_);
      model_.sample_aux(theta_, x,
                        {aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
                         static_cast<std::size_t>(aux_dim_)},
                        rng_);
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      model_.sample_aux(theta_, {},
                        {aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
                         static_cast<std::size_t>(aux_dim_)},
                        rng_);
    }
  }
}

StepSummary ParticleFilter::step(double value) {
  if (step_index_ > 0) propagate();

  const SmoothingKernel kernel(options_.epsilon);
  std::vector<double> grad_buf(static_cast<std::size_t>(dim_theta_), 0.0);

  // Weighting pass: simulated observation feature, kernel log-weight, and
  // (when requested) the observation-side gradient term for every particle.
  for (int i = 0; i < n_; ++i) {
    const std::span<const double> x{
        states_.data() + static_cast<std::size_t>(i) * state_dim_,
        static_cast<std::size_t>(state_dim_)};
    const std::span<const double> u{
        aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
        static_cast<std::size_t>(aux_dim_)};
    double raw;
    if (options_.compute_score) {
      raw = model_.tau_with_grad(theta_, x, u, grad_buf);
    } else {
      raw = model_.tau(theta_, x, u);
    }
    if (!std::isfinite(raw)) {
      throw EvaluationError("observation map produced a non-finite value",
                            theta_.values(),
                            std::vector<double>(x.begin(), x.end()));
    }
    const double center = transformed_ ? bounded_transform(raw) : raw;
    centers_[i] = center;
    log_weights_[i] = kernel.log_density(value, center);
    if (options_.compute_score) {
      const double scale = kernel.dlog_dcenter(value, center) *
                           (transformed_ ? bounded_transform_derivative(raw) : 1.0);
      double* row = grad_obs_.data() + static_cast<std::size_t>(i) * dim_theta_;
      for (int k = 0; k < dim_theta_; ++k) row[k] = scale * grad_buf[k];
      to_output_coordinates({row, static_cast<std::size_t>(dim_theta_)});
    }
  }

  // Predictive CDF of the value just seen, under the incoming mixture.
  double cdf = 0.0;
  if (incoming_uniform_) {
    for (int i = 0; i < n_; ++i) cdf += kernel.cdf(value, centers_[i]);
    cdf /= static_cast<double>(n_);
  } else {
    for (int i = 0; i < n_; ++i) cdf += incoming_[i] * kernel.cdf(value, centers_[i]);
  }

  // Likelihood update and weight normalization.
  double increment;
  if (incoming_uniform_) {
    const double log_norm = log_sum_exp(log_weights_);
    if (log_norm == -std::numeric_limits<double>::infinity()) {
      throw DegeneracyError(step_index_ + 1, options_.epsilon, theta_.values());
    }
    if (!std::isfinite(log_norm)) {
      throw EvaluationError("filter weight update produced a non-finite value",
                            theta_.values());
    }
    increment = log_norm - std::log(static_cast<double>(n_));
    normalize_from_log(log_weights_, log_norm, weights_);
  } else {
    for (int i = 0; i < n_; ++i) log_weights_[i] += std::log(incoming_[i]);
    const double log_norm = log_sum_exp(log_weights_);
    if (log_norm == -std::numeric_limits<double>::infinity()) {
      throw DegeneracyError(step_index_ + 1, options_.epsilon, theta_.values());
    }
    if (!std::isfinite(log_norm)) {
      throw EvaluationError("filter weight update produced a non-finite value",
                            theta_.values());
    }
    increment = log_norm;
    normalize_from_log(log_weights_, log_norm, weights_);
  }
  log_likelihood_ += increment;
  last_ess_ = effective_sample_size(weights_);

  // Score update, then the running total under the current weights.
  if (options_.compute_score) {
    if (options_.score_method == ScoreMethod::PathSpace) {
      accumulate_path_scores();
    } else {
      accumulate_marginal_scores();
    }
    for (int k = 0; k < dim_theta_; ++k) total_score_[k] = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double w = weights_[i];
      const double* row = scores_.data() + static_cast<std::size_t>(i) * dim_theta_;
      for (int k = 0; k < dim_theta_; ++k) total_score_[k] += w * row[k];
    }
    check_finite(total_score_, "score estimate", theta_.values());
    if (options_.score_method == ScoreMethod::Marginal) {
      prev_states_ = states_;
      prev_weights_ = weights_;
      prev_scores_ = scores_;
    }
  }

  const bool do_resample =
      options_.resample_ess_fraction >= 1.0 ||
      last_ess_ <= options_.resample_ess_fraction * static_cast<double>(n_);
  if (do_resample) {
    resample();
    incoming_uniform_ = true;
  } else {
    incoming_ = weights_;
    incoming_uniform_ = false;
  }

  ++step_index_;
  return StepSummary{increment, cdf, last_ess_, do_resample};
}

void ParticleFilter::accumulate_path_scores() {
  const bool first = (step_index_ == 0);
  const bool aux_dep = model_.aux_depends_on_theta();
  std::vector<double> term(static_cast<std::size_t>(dim_theta_), 0.0);
  std::vector<double> aux_term(static_cast<std::size_t>(dim_theta_), 0.0);

  for (int i = 0; i < n_; ++i) {
    const std::size_t soff = static_cast<std::size_t>(i) * dim_theta_;
    const std::span<const double> x{
        states_.data() + static_cast<std::size_t>(i) * state_dim_,
        static_cast<std::size_t>(state_dim_)};
    const std::span<const double> u{
        aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
        static_cast<std::size_t>(aux_dim_)};

    bool have_term = false;
    if (state_dim_ > 0) {
      if (first) {
        model_.grad_log_initial(theta_, x, term);
      } else {
        const std::span<const double> parent{
            parent_states_.data() + static_cast<std::size_t>(i) * state_dim_,
            static_cast<std::size_t>(state_dim_)};
        model_.grad_log_transition(theta_, parent, x, term);
      }
      have_term = true;
    }
    if (aux_dep) {
      model_.grad_log_aux(theta_, x, u, aux_term);
      if (have_term) {
        for (int k = 0; k < dim_theta_; ++k) term[k] += aux_term[k];
      } else {
        term = aux_term;
        have_term = true;
      }
    }
    if (have_term) to_output_coordinates(term);

    double* acc = scores_.data() + soff;
    const double* gh = grad_obs_.data() + soff;
    if (have_term) {
      for (int k = 0; k < dim_theta_; ++k) acc[k] += term[k] + gh[k];
    } else {
      for (int k = 0; k < dim_theta_; ++k) acc[k] += gh[k];
    }
    check_finite({acc, static_cast<std::size_t>(dim_theta_)},
                 "trajectory score accumulator", theta_.values());
  }
}

void ParticleFilter::accumulate_marginal_scores() {
  const bool first = (step_index_ == 0);
  const bool aux_dep = model_.aux_depends_on_theta();
  const bool has_chain = state_dim_ > 0;
  std::vector<double> term(static_cast<std::size_t>(dim_theta_), 0.0);
  std::vector<double> aux_term(static_cast<std::size_t>(dim_theta_), 0.0);

  if (first) {
    // No history: the accumulator is just this step's gradient terms.
    for (int i = 0; i < n_; ++i) {
      const std::size_t soff = static_cast<std::size_t>(i) * dim_theta_;
      const std::span<const double> x{
          states_.data() + static_cast<std::size_t>(i) * state_dim_,
          static_cast<std::size_t>(state_dim_)};
      const std::span<const double> u{
          aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
          static_cast<std::size_t>(aux_dim_)};
      for (int k = 0; k < dim_theta_; ++k) term[k] = 0.0;
      if (has_chain) model_.grad_log_initial(theta_, x, term);
      if (aux_dep) {
        model_.grad_log_aux(theta_, x, u, aux_term);
        for (int k = 0; k < dim_theta_; ++k) term[k] += aux_term[k];
      }
      to_output_coordinates(term);
      double* acc = scores_.data() + soff;
      const double* gh = grad_obs_.data() + soff;
      for (int k = 0; k < dim_theta_; ++k) acc[k] = term[k] + gh[k];
      check_finite({acc, static_cast<std::size_t>(dim_theta_)},
                   "marginal score accumulator", theta_.values());
    }
    return;
  }

  std::vector<double> log_k(static_cast<std::size_t>(n_), 0.0);
  std::vector<double> numerator(static_cast<std::size_t>(dim_theta_), 0.0);
  std::vector<double> grad_f(static_cast<std::size_t>(dim_theta_), 0.0);

  // Shared mixture mean for models without a latent chain: the transition
  // kernel drops out, so the smoothed history is the same for every particle.
  const bool collapsed = !has_chain && !options_.force_generic_mixture;
  double shared_den = 0.0;
  std::vector<double> shared_mean;
  if (collapsed) {
    for (int k = 0; k < dim_theta_; ++k) numerator[k] = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double w = prev_weights_[j];
      shared_den += w;
      const double* prev = prev_scores_.data() + static_cast<std::size_t>(j) * dim_theta_;
      for (int k = 0; k < dim_theta_; ++k) numerator[k] += w * prev[k];
    }
    shared_mean.resize(static_cast<std::size_t>(dim_theta_));
    for (int k = 0; k < dim_theta_; ++k) shared_mean[k] = numerator[k] / shared_den;
  }

  for (int i = 0; i < n_; ++i) {
    const std::size_t soff = static_cast<std::size_t>(i) * dim_theta_;
    const std::span<const double> x{
        states_.data() + static_cast<std::size_t>(i) * state_dim_,
        static_cast<std::size_t>(state_dim_)};
    const std::span<const double> u{
        aux_.data() + static_cast<std::size_t>(i) * aux_dim_,
        static_cast<std::size_t>(aux_dim_)};
    double* acc = scores_.data() + soff;

    if (collapsed) {
      for (int k = 0; k < dim_theta_; ++k) acc[k] = shared_mean[k];
    } else {
      // Mixture over the previous weighted system. The transition densities
      // are exponentiated relative to their row maximum, so the products
      // prev_weight * exp(log_k - max) stay in range; the normalized weights
      // themselves are never pushed through log().
      double max_log_k = 0.0;
      if (has_chain) {
        max_log_k = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_; ++j) {
          const std::span<const double> xj{
              prev_states_.data() + static_cast<std::size_t>(j) * state_dim_,
              static_cast<std::size_t>(state_dim_)};
          log_k[j] = model_.log_transition(theta_, xj, x);
          if (log_k[j] > max_log_k) max_log_k = log_k[j];
        }
        if (max_log_k == -std::numeric_limits<double>::infinity()) {
          throw DegeneracyError(step_index_ + 1, options_.epsilon,
                                theta_.values(),
                                "every transition mixture weight underflowed");
        }
      }

      double den = 0.0;
      for (int k = 0; k < dim_theta_; ++k) numerator[k] = 0.0;
      for (int j = 0; j < n_; ++j) {
        const double lk = has_chain ? log_k[j] : 0.0;
        const double w = prev_weights_[j] * std::exp(lk - max_log_k);
        if (w == 0.0) continue;
        den += w;
        const double* prev =
            prev_scores_.data() + static_cast<std::size_t>(j) * dim_theta_;
        if (has_chain) {
          const std::span<const double> xj{
              prev_states_.data() + static_cast<std::size_t>(j) * state_dim_,
              static_cast<std::size_t>(state_dim_)};
          model_.grad_log_transition(theta_, xj, x, grad_f);
          to_output_coordinates(grad_f);
          for (int k = 0; k < dim_theta_; ++k)
            numerator[k] += w * (prev[k] + grad_f[k]);
        } else {
          for (int k = 0; k < dim_theta_; ++k) numerator[k] += w * (prev[k] + 0.0);
        }
      }
      if (den == 0.0) {
        throw DegeneracyError(step_index_ + 1, options_.epsilon, theta_.values(),
                              "every transition mixture weight underflowed");
      }
      for (int k = 0; k < dim_theta_; ++k) acc[k] = numerator[k] / den;
    }

    if (aux_dep) {
      model_.grad_log_aux(theta_, x, u, aux_term);
      to_output_coordinates(aux_term);
      for (int k = 0; k < dim_theta_; ++k) acc[k] += aux_term[k];
    }
    const double* gh = grad_obs_.data() + soff;
    for (int k = 0; k < dim_theta_; ++k) acc[k] += gh[k];
    check_finite({acc, static_cast<std::size_t>(dim_theta_)},
                 "marginal score accumulator", theta_.values());
  }
}

void ParticleFilter::resample() {
  systematic_resample(weights_, rng_, ancestors_);
  if (state_dim_ > 0) {
    gather_.resize(states_.size());
    for (int k = 0; k < n_; ++k) {
      const std::size_t src = static_cast<std::size_t>(ancestors_[k]) * state_dim_;
      const std::size_t dst = static_cast<std::size_t>(k) * state_dim_;
      for (int d = 0; d < state_dim_; ++d) gather_[dst + d] = states_[src + d];
    }
    states_.swap(gather_);
  }
  if (options_.compute_score &&
      options_.score_method == ScoreMethod::PathSpace) {
    for (int k = 0; k < n_; ++k) {
      const std::size_t src = static_cast<std::size_t>(ancestors_[k]) * dim_theta_;
      const std::size_t dst = static_cast<std::size_t>(k) * dim_theta_;
      for (int d = 0; d < dim_theta_; ++d)
        scratch_scores_[dst + d] = scores_[src + d];
    }
    scores_.swap(scratch_scores_);
  }
}

GradientVector ParticleFilter::total_score() const {
  return GradientVector{total_score_, options_.score_coordinates};
}

double estimate_log_likelihood(const Model& model, const ParameterVector& theta,
                               std::span<const double> values, double epsilon,
                               int particle_count, std::uint64_t seed,
                               std::optional<bool> transform_observations) {
  if (values.empty()) return 0.0;
  FilterOptions options;
  options.epsilon = epsilon;
  options.particle_count = particle_count;
  options.compute_score = false;
  options.transform_observations = transform_observations;
  ParticleFilter filter(model, theta, options, seed);
  for (double v : values) filter.step(v);
  return filter.log_likelihood();
}

FilterRunResult run_filter(const Model& model, const ParameterVector& theta,
                           std::span<const double> values,
                           const FilterOptions& options, std::uint64_t seed) {
  FilterRunResult result;
  ParticleFilter filter(model, theta, options, seed);
  result.step_log_likelihood.reserve(values.size());
  result.step_ess.reserve(values.size());
  result.conditional_cdfs.reserve(values.size());
  for (double v : values) {
    const StepSummary summary = filter.step(v);
    result.step_log_likelihood.push_back(filter.log_likelihood());
    result.step_ess.push_back(summary.ess);
    result.conditional_cdfs.push_back(summary.conditional_cdf);
  }
  result.log_likelihood = filter.log_likelihood();
  result.score = filter.total_score();
  return result;
}

}  // namespace abcmle
