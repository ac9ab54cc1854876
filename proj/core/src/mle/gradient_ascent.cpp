#include "abcmle/mle/gradient_ascent.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "abcmle/iid/score.hpp"
#include "abcmle/streams.hpp"

namespace abcmle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_ascent(const AscentOptions& options, const ParameterVector& theta0,
                     std::span<const double> values, bool batch) {
  validate_schedule(options.schedule, theta0.size());
  if (batch && options.iterations < 1) {
    std::ostringstream os;
    os << "iteration count must be at least 1, got " << options.iterations;
    throw ConfigError(os.str());
  }
  if (options.average_last < 1) {
    std::ostringstream os;
    os << "tail-average window must be at least 1, got "
       << options.average_last;
    throw ConfigError(os.str());
  }
  if (!(options.clip_factor > 0.0) || !std::isfinite(options.clip_factor)) {
    std::ostringstream os;
    os << "clip factor must be strictly positive and finite, got "
       << options.clip_factor;
    throw ConfigError(os.str());
  }
  if (options.record_stride < 1) {
    std::ostringstream os;
    os << "record stride must be at least 1, got " << options.record_stride;
    throw ConfigError(os.str());
  }
  if (values.empty()) {
    throw ConfigError(batch
                          ? "batch estimation requires at least one observation"
                          : "online estimation requires a nonempty "
                            "observation stream");
  }
}

// Shared update arithmetic and tail averaging for both drivers.
class Updater {
 public:
  Updater(const Model& model, const ParameterVector& theta0,
          const AscentOptions& options)
      : model_(model),
        options_(options),
        theta_(model.clamp(theta0)),
        tail_capacity_(options.average_last) {}

  const ParameterVector& theta() const { return theta_; }
  long clip_events() const { return clip_events_; }

  // One ascent step with the given unconstrained-coordinate gradient.
  // Returns true if any coordinate was clipped. An exactly-zero update skips
  // the reparameterization round-trip so a frozen theta stays bitwise fixed.
  bool update(long j, std::span<const double> grad) {
    const double gamma = options_.schedule.gamma(j);
    const std::size_t dim = theta_.size();
    std::vector<double> delta(dim, 0.0);
    bool clipped = false;
    bool moved = false;
    for (std::size_t k = 0; k < dim; ++k) {
      const double scale = gamma * options_.schedule.multiplier(k);
      double d = scale * grad[k];
      const double limit = options_.clip_factor * scale;
      if (std::abs(d) > limit) {
        d = std::copysign(limit, d);
        clipped = true;
      }
      delta[k] = d;
      if (d != 0.0) moved = true;
    }
    if (clipped) ++clip_events_;
    if (!moved) return clipped;
    std::vector<double> v = to_unconstrained(theta_);
    for (std::size_t k = 0; k < dim; ++k) v[k] += delta[k];
    check_finite(v, "parameter update", theta_.values());
    theta_ = model_.clamp(from_unconstrained(theta_.domain(), v));
    return clipped;
  }

  void push_tail() {
    if (static_cast<long>(tail_.size()) < tail_capacity_) {
      tail_.push_back(theta_.values());
    } else {
      tail_[static_cast<std::size_t>(tail_count_ % tail_capacity_)] =
          theta_.values();
    }
    ++tail_count_;
  }

  long tail_count() const { return std::min(tail_count_, tail_capacity_); }

  std::vector<double> tail_average() const {
    if (tail_.empty()) return theta_.values();
    std::vector<double> mean(theta_.size(), 0.0);
    for (const auto& entry : tail_) {
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += entry[k];
    }
    const double count = static_cast<double>(tail_.size());
    for (double& m : mean) m /= count;
    return mean;
  }

  // Converts a score estimate to unconstrained coordinates at the current
  // theta if it is not there already.
  std::vector<double> to_unconstrained_score(const GradientVector& score) const {
    std::vector<double> g = score.values;
    if (score.coordinates == GradientCoordinates::Natural) {
      const std::vector<double> jac = unconstrained_jacobian(theta_);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] *= jac[k];
    }
    return g;
  }

 private:
  const Model& model_;
  const AscentOptions& options_;
  ParameterVector theta_;
  long clip_events_ = 0;
  long tail_capacity_;
  long tail_count_ = 0;
  std::vector<std::vector<double>> tail_;
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void finalize(RunRecord& record, const Updater& updater) {
  record.clip_events = updater.clip_events();
  record.final_theta = updater.tail_average();
  record.averaged = updater.tail_count();
}

}  // namespace

RunRecord batch_gradient_ascent(const Model& model,
                                const ParameterVector& theta0,
                                std::span<const double> values,
                                const AscentOptions& options,
                                std::uint64_t seed,
                                ScoreProvider score_override) {
  validate_ascent(options, theta0, values, /*batch=*/true);
  const bool iid = (model.state_dim() == 0);

  RunRecord record;
  Updater updater(model, theta0, options);
  record.initial_theta = updater.theta().values();

  for (long j = 1; j <= options.iterations; ++j) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t pass_seed =
        derive_seed(seed, kStreamFilter, static_cast<std::uint64_t>(j));
    GradientVector score;
    double log_likelihood = kNaN;
    double ess = kNaN;
    try {
      if (score_override) {
        score = score_override(updater.theta(), j);
      } else if (iid) {
        IidScoreOptions iid_options;
        iid_options.epsilon = options.epsilon;
        iid_options.sample_count = options.particle_count;
        iid_options.coordinates = GradientCoordinates::Unconstrained;
        iid_options.transform_observations = options.transform_observations;
        IidScoreResult result =
            iid_score_series(model, updater.theta(), values, iid_options,
                             pass_seed);
        score = std::move(result.score);
        log_likelihood = result.log_likelihood;
        ess = result.min_ess;
      } else {
        FilterOptions filter_options;
        filter_options.epsilon = options.epsilon;
        filter_options.particle_count = options.particle_count;
        filter_options.score_method = options.score_method;
        filter_options.compute_score = true;
        filter_options.score_coordinates = GradientCoordinates::Unconstrained;
        filter_options.transform_observations = options.transform_observations;
        FilterRunResult result = run_filter(model, updater.theta(), values,
                                            filter_options, pass_seed);
        score = std::move(result.score);
        log_likelihood = result.log_likelihood;
        ess = result.step_ess.back();
      }
    } catch (const DegeneracyError& error) {
      record.completed = false;
      record.abort_reason = error.what();
      break;
    }
    const std::vector<double> grad = updater.to_unconstrained_score(score);
    const bool clipped = updater.update(j, grad);
    updater.push_tail();
    record.updates = j;
    if (j % options.record_stride == 0 || j == options.iterations) {
      RunStep step;
      step.index = j;
      step.theta = updater.theta().values();
      step.gradient = grad;
      step.log_likelihood = log_likelihood;
      step.ess = ess;
      step.clipped = clipped;
      if (options.record_timing) step.seconds = elapsed_seconds(start);
      record.steps.push_back(std::move(step));
    }
  }

  finalize(record, updater);
  return record;
}

RunRecord online_gradient_ascent(const Model& model,
                                 const ParameterVector& theta0,
                                 std::span<const double> values,
                                 const AscentOptions& options,
                                 std::uint64_t seed) {
  validate_ascent(options, theta0, values, /*batch=*/false);
  const bool iid = (model.state_dim() == 0);
  const std::uint64_t pass_seed = derive_seed(seed, kStreamFilter, 1);
  const long n = static_cast<long>(values.size());

  RunRecord record;
  Updater updater(model, theta0, options);
  record.initial_theta = updater.theta().values();

  IidScoreOptions iid_options;
  std::optional<ParticleFilter> filter;
  std::vector<double> previous_total(theta0.size(), 0.0);
  if (iid) {
    iid_options.epsilon = options.epsilon;
    iid_options.sample_count = options.particle_count;
    iid_options.coordinates = GradientCoordinates::Unconstrained;
    iid_options.transform_observations = options.transform_observations;
  } else {
    FilterOptions filter_options;
    filter_options.epsilon = options.epsilon;
    filter_options.particle_count = options.particle_count;
    filter_options.score_method = ScoreMethod::Marginal;
    filter_options.compute_score = true;
    filter_options.score_coordinates = GradientCoordinates::Unconstrained;
    filter_options.transform_observations = options.transform_observations;
    filter.emplace(model, updater.theta(), filter_options, pass_seed);
  }

  for (long t = 1; t <= n; ++t) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> grad;
    double log_likelihood = kNaN;
    double ess = kNaN;
    try {
      if (iid) {
        Rng rng = Rng::keyed(pass_seed, kStreamObservation,
                             static_cast<std::uint64_t>(t));
        ObservationScore obs = iid_observation_score(
            model, updater.theta(), values[static_cast<std::size_t>(t - 1)],
            iid_options, rng, t);
        grad = std::move(obs.score);
        log_likelihood = obs.log_density;
        ess = obs.ess;
      } else {
        const StepSummary summary =
            filter->step(values[static_cast<std::size_t>(t - 1)]);
        const GradientVector total = filter->total_score();
        grad.resize(total.size());
        for (std::size_t k = 0; k < total.size(); ++k) {
          grad[k] = total.values[k] - previous_total[k];
        }
        previous_total = total.values;
        log_likelihood = summary.log_likelihood_increment;
        ess = summary.ess;
      }
    } catch (const DegeneracyError& error) {
      record.completed = false;
      record.abort_reason = error.what();
      break;
    }
    const bool clipped = updater.update(t, grad);
    if (!iid) filter->set_theta(updater.theta());
    updater.push_tail();
    record.updates = t;
    if (t % options.record_stride == 0 || t == n) {
      RunStep step;
      step.index = t;
      step.theta = updater.theta().values();
      step.gradient = grad;
      step.log_likelihood = log_likelihood;
      step.ess = ess;
      step.clipped = clipped;
      if (options.record_timing) step.seconds = elapsed_seconds(start);
      record.steps.push_back(std::move(step));
    }
  }

  finalize(record, updater);
  return record;
}

}  // namespace abcmle
