#pragma once

// Shared test utilities: summary statistics, Kolmogorov-Smirnov distances,
// closed-form references for the linear-Gaussian model, and a trivial
// constant-observation model used to pin degenerate-weight behaviour.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abcmle/kernel.hpp"
#include "abcmle/model.hpp"
#include "abcmle/models/kalman.hpp"
#include "abcmle/parameters.hpp"

namespace testsupport {

inline double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline double sample_variance(std::span<const double> values) {
  const double m = mean(values);
  double sum = 0.0;
  for (double v : values) sum += (v - m) * (v - m);
  return sum / static_cast<double>(values.size() - 1);
}

inline double standard_error(std::span<const double> values) {
  return std::sqrt(sample_variance(values) /
                   static_cast<double>(values.size()));
}

// KS distance between the empirical CDF of `values` and a reference CDF.
inline double ks_statistic(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// KS distance of sorted-or-not values in [0,1] against Uniform[0,1].
inline double ks_uniform(std::vector<double> values) {
  return ks_statistic(std::move(values), [](double x) { return x; });
}

// Central finite differences of the exact smoothed-model log-likelihood of
// the linear-Gaussian model, in natural coordinates theta = (phi, sigma_x2,
// sigma_y). The reference the sampling-based score estimates must agree with.
inline std::vector<double> kalman_fd_score(std::span<const double> y,
                                           const std::vector<double>& theta,
                                           double epsilon,
                                           double delta = 1e-5) {
  const auto value = [&](const std::vector<double>& t) {
    return abcmle::kalman_log_likelihood(y, t[0], t[1],
                                         t[2] * t[2] + epsilon * epsilon);
  };
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    std::vector<double> hi = theta;
    std::vector<double> lo = theta;
    const double step = delta * std::max(1.0, std::abs(theta[k]));
    hi[k] += step;
    lo[k] -= step;
    grad[k] = (value(hi) - value(lo)) / (2.0 * step);
  }
  return grad;
}

// Maximizer of the exact smoothed-model log-likelihood by cyclic coordinate
// descent with interval refinement. Independent of every code path under
// test except kalman_log_likelihood itself.
inline std::vector<double> kalman_mle(std::span<const double> y,
                                      double epsilon) {
  const auto value = [&](const std::vector<double>& t) {
    return abcmle::kalman_log_likelihood(y, t[0], t[1],
                                         t[2] * t[2] + epsilon * epsilon);
  };
  std::vector<double> theta = {0.0, 1.0, 1.0};
  std::vector<double> lower = {-0.99, 1e-4, 1e-4};
  std::vector<double> upper = {0.99, 10.0, 10.0};
  for (int round = 0; round < 60; ++round) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const int grid = 33;
      double best_v = -1e300;
      double best_t = theta[k];
      for (int i = 0; i < grid; ++i) {
        std::vector<double> cand = theta;
        cand[k] = lower[k] + (upper[k] - lower[k]) * i /
                                 static_cast<double>(grid - 1);
        const double v = value(cand);
        if (v > best_v) {
          best_v = v;
          best_t = cand[k];
        }
      }
      theta[k] = best_t;
      const double width = (upper[k] - lower[k]) / 4.0;
      lower[k] = std::max(lower[k], best_t - width);
      upper[k] = std::min(upper[k], best_t + width);
    }
  }
  return theta;
}

// Observation model with a constant observation map: tau == value for every
// auxiliary draw, no latent chain, one dummy auxiliary coordinate. Every
// particle gets an identical kernel weight, which pins the uniform-weight
// and equal-center edge cases exactly.
class ConstantObservationModel : public abcmle::Model {
 public:
  explicit ConstantObservationModel(double value = 0.0) : value_(value) {
    domain_.coordinates = {abcmle::CoordinateDomain::unbounded("shift")};
  }

  const std::string& name() const override { return name_; }
  const abcmle::ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 0; }
  int aux_dim() const override { return 1; }
  bool uses_observation_transform() const override { return false; }

  void sample_aux(const abcmle::ParameterVector&, std::span<const double>,
                  std::span<double> u, abcmle::Rng& rng) const override {
    u[0] = rng.normal();
  }
  double log_aux(const abcmle::ParameterVector&, std::span<const double>,
                 std::span<const double> u) const override {
    return -0.5 * (abcmle::kLogTwoPi + u[0] * u[0]);
  }
  double tau(const abcmle::ParameterVector& theta, std::span<const double>,
             std::span<const double>) const override {
    return value_ + theta[0];
  }
  void grad_tau(const abcmle::ParameterVector&, std::span<const double>,
                std::span<const double>, std::span<double> grad) const override {
    grad[0] = 1.0;
  }

 private:
  std::string name_ = "constant_observation";
  abcmle::ParameterDomain domain_;
  double value_;
};

// Three unconstrained coordinates, so the optimizer's reparameterization is
// the identity and update arithmetic is observable exactly. The observation
// side is a plain location model; it exists so driver code paths that fall
// back to the i.i.d. estimator have something valid to evaluate.
class UnboundedTripleModel : public abcmle::Model {
 public:
  UnboundedTripleModel() {
    domain_.coordinates = {abcmle::CoordinateDomain::unbounded("p0"),
                           abcmle::CoordinateDomain::unbounded("p1"),
                           abcmle::CoordinateDomain::unbounded("p2")};
  }

  const std::string& name() const override { return name_; }
  const abcmle::ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 0; }
  int aux_dim() const override { return 1; }
  bool uses_observation_transform() const override { return false; }

  void sample_aux(const abcmle::ParameterVector&, std::span<const double>,
                  std::span<double> u, abcmle::Rng& rng) const override {
    u[0] = rng.normal();
  }
  double log_aux(const abcmle::ParameterVector&, std::span<const double>,
                 std::span<const double> u) const override {
    return -0.5 * (abcmle::kLogTwoPi + u[0] * u[0]);
  }
  double tau(const abcmle::ParameterVector& theta, std::span<const double>,
             std::span<const double> u) const override {
    return theta[0] + theta[1] * u[0] + theta[2];
  }
  void grad_tau(const abcmle::ParameterVector&, std::span<const double>,
                std::span<const double> u,
                std::span<double> grad) const override {
    grad[0] = 1.0;
    grad[1] = u[0];
    grad[2] = 1.0;
  }

 private:
  std::string name_ = "unbounded_triple";
  abcmle::ParameterDomain domain_;
};

}  // namespace testsupport
