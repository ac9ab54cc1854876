// Particle filter behaviour: initialization, likelihood estimation against
// the closed-form reference, conditional-CDF properties, score estimators,
// and the degenerate edge cases.

#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "abcmle/errors.hpp"
#include "abcmle/iid/score.hpp"
#include "abcmle/models/g_and_k.hpp"
#include "abcmle/models/kalman.hpp"
#include "abcmle/models/registry.hpp"
#include "abcmle/observation.hpp"
#include "abcmle/rng.hpp"
#include "abcmle/smc/particle_filter.hpp"
#include "support/helpers.hpp"

using namespace abcmle;

namespace {

std::vector<double> surrogate_data(const std::vector<double>& theta_values,
                                   long n, std::uint64_t seed, double eps) {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta(theta_values, model->domain());
  Rng rng(seed);
  const std::vector<double> raw = model->simulate(theta, n, rng);
  return corrupt_observations(raw, eps, false, derive_seed(seed, 2)).values;
}

}  // namespace

TEST_CASE("filter construction validates its options") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  FilterOptions options;
  options.particle_count = 1;
  CHECK_THROWS_AS(ParticleFilter(*model, theta, options, 1), ConfigError);
  options.particle_count = 100;
  options.epsilon = 0.0;
  CHECK_THROWS_AS(ParticleFilter(*model, theta, options, 1), ConfigError);
  options.epsilon = 0.1;
  options.resample_ess_fraction = 0.0;
  CHECK_THROWS_AS(ParticleFilter(*model, theta, options, 1), ConfigError);
}

TEST_CASE("fresh filter: uniform weights, zero score, stationary spread") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const double phi = 0.8, sigma_x2 = 0.5;
  const ParameterVector theta({phi, sigma_x2, 0.5}, model->domain());
  FilterOptions options;
  options.particle_count = 100000;
  ParticleFilter filter(*model, theta, options, 5);

  CHECK(filter.step_index() == 0);
  CHECK(filter.log_likelihood() == 0.0);
  for (double w : filter.weights()) {
    CHECK(w == doctest::Approx(1e-5).epsilon(1e-12));
  }
  const GradientVector score = filter.total_score();
  for (double s : score.values) CHECK(s == 0.0);
  CHECK(testsupport::sample_variance(filter.states()) ==
        doctest::Approx(sigma_x2 / (1.0 - phi * phi)).epsilon(0.02));
}

TEST_CASE("identical observation features give uniform weights and full ESS") {
  const testsupport::ConstantObservationModel model(0.3);
  const ParameterVector theta({0.0}, model.domain());
  FilterOptions options;
  options.particle_count = 64;
  options.compute_score = false;
  ParticleFilter filter(model, theta, options, 7);
  const StepSummary step = filter.step(0.45);
  CHECK(step.ess == doctest::Approx(64.0).epsilon(1e-12));
  for (double w : filter.weights()) {
    CHECK(w == doctest::Approx(1.0 / 64).epsilon(1e-12));
  }
  // All centers equal the constant, so the predictive CDF is a single
  // Gaussian CDF evaluated at the observation.
  CHECK(step.conditional_cdf ==
        doctest::Approx(normal_cdf((0.45 - 0.3) / options.epsilon))
            .epsilon(1e-12));
}

TEST_CASE("conditional CDF hits one half at the center and one at infinity") {
  const testsupport::ConstantObservationModel model(0.3);
  const ParameterVector theta({0.0}, model.domain());
  FilterOptions options;
  options.particle_count = 16;
  options.compute_score = false;
  {
    ParticleFilter filter(model, theta, options, 7);
    CHECK(filter.step(0.3).conditional_cdf ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  {
    ParticleFilter filter(model, theta, options, 7);
    CHECK(filter.step(1e12).conditional_cdf == 1.0);
  }
}

TEST_CASE("conditional CDF is nondecreasing in the observation") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  FilterOptions options;
  options.particle_count = 200;
  options.compute_score = false;
  double previous = -1.0;
  for (double y = -3.0; y <= 3.0; y += 0.25) {
    // Same seed: the pre-weighting particle system is identical, only the
    // observation changes.
    ParticleFilter filter(*model, theta, options, 11);
    const double value = filter.step(y).conditional_cdf;
    CHECK(value >= previous);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    previous = value;
  }
}

TEST_CASE("empty series has zero log-likelihood") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  CHECK(estimate_log_likelihood(*model, theta, {}, 0.1, 100, 3) == 0.0);

  FilterOptions options;
  options.particle_count = 100;
  const FilterRunResult run = run_filter(*model, theta, {}, options, 3);
  CHECK(run.log_likelihood == 0.0);
  for (double s : run.score.values) CHECK(s == 0.0);
}

TEST_CASE("likelihood estimates are deterministic in the seed") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  const std::vector<double> data = surrogate_data({0.8, 0.5, 0.5}, 20, 13, 0.1);
  const double a = estimate_log_likelihood(*model, theta, data, 0.1, 200, 17);
  const double b = estimate_log_likelihood(*model, theta, data, 0.1, 200, 17);
  const double c = estimate_log_likelihood(*model, theta, data, 0.1, 200, 18);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("single-step likelihood estimator is unbiased against closed form") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const std::vector<double> theta_values = {0.6, 0.4, 0.5};
  const ParameterVector theta(theta_values, model->domain());
  const double eps = 0.1;
  const std::vector<double> data = {0.3};
  const double exact = std::exp(kalman_log_likelihood(
      data, theta_values[0], theta_values[1],
      theta_values[2] * theta_values[2] + eps * eps));

  const int runs = 10000;
  std::vector<double> estimates(runs);
  for (int r = 0; r < runs; ++r) {
    estimates[r] = std::exp(estimate_log_likelihood(
        *model, theta, data, eps, 64, derive_seed(900, 4, r)));
  }
  const double gap = std::abs(testsupport::mean(estimates) - exact);
  CHECK(gap < 3.0 * testsupport::standard_error(estimates));
}

TEST_CASE("log-likelihood tracks the closed-form value on a long series") {
  const std::vector<double> theta_values = {0.8, 0.5, 0.5};
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta(theta_values, model->domain());
  const double eps = 0.1;
  const std::vector<double> data = surrogate_data(theta_values, 50, 19, eps);
  const double exact = kalman_log_likelihood(
      data, theta_values[0], theta_values[1],
      theta_values[2] * theta_values[2] + eps * eps);
  const double estimate =
      estimate_log_likelihood(*model, theta, data, eps, 20000, 23);
  CHECK(std::abs(estimate - exact) < 0.5);
}

TEST_CASE("doubling the particle count reduces estimator variance") {
  const std::vector<double> theta_values = {0.8, 0.5, 0.5};
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta(theta_values, model->domain());
  const double eps = 0.1;
  const std::vector<double> data = surrogate_data(theta_values, 10, 29, eps);

  const auto variance_at = [&](int n_particles, std::uint64_t tag) {
    std::vector<double> estimates(100);
    for (int r = 0; r < 100; ++r) {
      estimates[r] = std::exp(estimate_log_likelihood(
          *model, theta, data, eps, n_particles, derive_seed(tag, 5, r)));
    }
    return testsupport::sample_variance(estimates);
  };
  CHECK(variance_at(500, 31) < variance_at(250, 37));
}

TEST_CASE("resampling is unconditional by default, adaptive behind the flag") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  const std::vector<double> data = surrogate_data({0.8, 0.5, 0.5}, 10, 41, 0.1);

  FilterOptions options;
  options.particle_count = 100;
  options.compute_score = false;
  ParticleFilter always(*model, theta, options, 43);
  for (double y : data) CHECK(always.step(y).resampled);

  // With a tiny trigger fraction, some steps must skip resampling.
  options.resample_ess_fraction = 0.01;
  ParticleFilter adaptive(*model, theta, options, 43);
  int skipped = 0;
  for (double y : data) {
    if (!adaptive.step(y).resampled) ++skipped;
  }
  CHECK(skipped > 0);
}

TEST_CASE("all-underflowed weights raise a degeneracy error") {
  const testsupport::ConstantObservationModel model(0.0);
  const ParameterVector theta({0.0}, model.domain());
  FilterOptions options;
  options.particle_count = 32;
  options.epsilon = 1e-300;
  options.compute_score = false;
  ParticleFilter filter(model, theta, options, 47);
  CHECK_THROWS_AS((void)filter.step(1.0), DegeneracyError);
}

TEST_CASE("path-space and marginal estimators coincide on one observation") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  FilterOptions options;
  options.particle_count = 256;
  options.score_method = ScoreMethod::PathSpace;
  ParticleFilter path(*model, theta, options, 53);
  options.score_method = ScoreMethod::Marginal;
  ParticleFilter marginal(*model, theta, options, 53);

  const StepSummary a = path.step(0.4);
  const StepSummary b = marginal.step(0.4);
  CHECK(a.log_likelihood_increment == b.log_likelihood_increment);
  const GradientVector sa = path.total_score();
  const GradientVector sb = marginal.total_score();
  for (std::size_t k = 0; k < sa.size(); ++k) {
    CHECK(sa[k] == doctest::Approx(sb[k]).epsilon(1e-12));
  }
}

TEST_CASE("chain-free models collapse the quadratic mixture exactly") {
  const std::unique_ptr<Model> model = make_model("g_and_k");
  const ParameterVector theta({2.0, 0.5, 10.0, 2.0}, model->domain());
  Rng rng(59);
  const std::vector<double> raw = model->simulate(theta, 10, rng);
  const std::vector<double> data =
      corrupt_observations(raw, 0.1, true, 61).values;

  FilterOptions options;
  options.particle_count = 50;
  options.score_method = ScoreMethod::Marginal;
  FilterOptions generic = options;
  generic.force_generic_mixture = true;

  const FilterRunResult fast = run_filter(*model, theta, data, options, 67);
  const FilterRunResult slow = run_filter(*model, theta, data, generic, 67);
  CHECK(fast.log_likelihood == slow.log_likelihood);
  REQUIRE(fast.score.size() == slow.score.size());
  for (std::size_t k = 0; k < fast.score.size(); ++k) {
    CHECK(fast.score[k] == slow.score[k]);  // bitwise: the mixture weights
                                            // are exactly one in both paths
  }
}

TEST_CASE("filter score and importance-sampling score agree on one point") {
  // Both estimate the same per-observation score for a chain-free model;
  // their Monte Carlo means over many replicates must match.
  const std::unique_ptr<Model> model = make_model("g_and_k");
  const ParameterVector theta({2.0, 0.5, 10.0, 2.0}, model->domain());
  const double y = std::atan(gk_quantile(0.7, 2.0, 0.5, 10.0, 2.0)) + 0.05;

  const int runs = 10000;
  const int n_samples = 100;
  std::vector<std::vector<double>> pf_scores(4), iid_scores(4);
  FilterOptions options;
  options.particle_count = n_samples;
  options.score_method = ScoreMethod::PathSpace;
  IidScoreOptions iid_options;
  iid_options.sample_count = n_samples;
  for (int r = 0; r < runs; ++r) {
    ParticleFilter filter(*model, theta, options,
                          derive_seed(1000, 6, r));
    filter.step(y);
    const GradientVector from_filter = filter.total_score();
    Rng rng(derive_seed(2000, 6, r));
    const ObservationScore from_iid =
        iid_observation_score(*model, theta, y, iid_options, rng);
    for (int k = 0; k < 4; ++k) {
      pf_scores[k].push_back(from_filter[k]);
      iid_scores[k].push_back(from_iid.score[k]);
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double gap = std::abs(testsupport::mean(pf_scores[k]) -
                                testsupport::mean(iid_scores[k]));
    const double se = std::sqrt(
        testsupport::sample_variance(pf_scores[k]) / runs +
        testsupport::sample_variance(iid_scores[k]) / runs);
    CHECK(gap < 3.0 * se);
  }
}

TEST_CASE("expected score at the data-generating parameters is zero") {
  const std::unique_ptr<Model> model = make_model("g_and_k");
  const ParameterVector theta({2.0, 0.5, 10.0, 2.0}, model->domain());
  Rng rng(71);
  const std::vector<double> raw = model->simulate(theta, 10000, rng);

  IidScoreOptions options;
  options.sample_count = 1000;
  const std::vector<GradientVector> scores =
      gradient_histogram(*model, theta, raw, options, 73);
  for (int k = 0; k < 4; ++k) {
    std::vector<double> coord(scores.size());
    for (std::size_t t = 0; t < scores.size(); ++t) coord[t] = scores[t][k];
    CHECK(std::abs(testsupport::mean(coord)) <
          3.0 * testsupport::standard_error(coord));
  }
}

TEST_CASE("single raw observation produces exactly one score vector") {
  const std::unique_ptr<Model> model = make_model("g_and_k");
  const ParameterVector theta({2.0, 0.5, 10.0, 2.0}, model->domain());
  IidScoreOptions options;
  options.sample_count = 100;
  const std::vector<GradientVector> scores =
      gradient_histogram(*model, theta, std::vector<double>{9.7}, options, 79);
  CHECK(scores.size() == 1);
  CHECK(scores[0].size() == 4);
}

TEST_CASE("importance-sampling score rejects chain models and bad settings") {
  const std::unique_ptr<Model> chain = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, chain->domain());
  IidScoreOptions options;
  Rng rng(83);
  CHECK_THROWS_AS(
      (void)iid_observation_score(*chain, theta, 0.1, options, rng),
      ConfigError);

  const std::unique_ptr<Model> iid = make_model("g_and_k");
  const ParameterVector gk({2.0, 0.5, 10.0, 2.0}, iid->domain());
  options.sample_count = 1;
  CHECK_THROWS_AS((void)iid_observation_score(*iid, gk, 0.1, options, rng),
                  ConfigError);
}

TEST_CASE("conditional-CDF values are uniform under the generating model") {
  const std::vector<double> theta_values = {0.8, 0.5, 0.5};
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta(theta_values, model->domain());
  const double eps = 0.1;
  const std::vector<double> data =
      surrogate_data(theta_values, 2000, 89, eps);

  FilterOptions options;
  options.particle_count = 1000;
  options.epsilon = eps;
  options.compute_score = false;
  const FilterRunResult run = run_filter(*model, theta, data, options, 97);
  CHECK(testsupport::ks_uniform(run.conditional_cdfs) <
        1.63 / std::sqrt(2000.0));
}
