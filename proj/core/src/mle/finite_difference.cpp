#include "abcmle/mle/finite_difference.hpp"

#include <cmath>
#include <sstream>

#include "abcmle/smc/particle_filter.hpp"

namespace abcmle {

namespace {

void validate_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    std::ostringstream os;
    os.precision(17);
    os << "finite-difference step must be positive and finite, got " << delta;
    throw ConfigError(os.str());
  }
}

}  // namespace

std::vector<double> finite_difference_gradient(
    const std::function<double(const ParameterVector&)>& f,
    const ParameterVector& theta, double delta) {
  validate_delta(delta);
  std::vector<double> grad(theta.size(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    std::vector<double> up = theta.values();
    std::vector<double> down = theta.values();
    up[k] += delta;
    down[k] -= delta;
    const double f_up = f(theta.with_values(std::move(up)));
    const double f_down = f(theta.with_values(std::move(down)));
    grad[k] = (f_up - f_down) / (2.0 * delta);
  }
  return grad;
}

GradientVector finite_difference_score(
    const Model& model, const ParameterVector& theta,
    std::span<const double> values, double epsilon, int particle_count,
    double delta, std::uint64_t seed,
    std::optional<bool> transform_observations) {
  validate_delta(delta);
  const auto log_likelihood = [&](const ParameterVector& point) {
    return estimate_log_likelihood(model, point, values, epsilon,
                                   particle_count, seed,
                                   transform_observations);
  };
  GradientVector result;
  result.values = finite_difference_gradient(log_likelihood, theta, delta);
  result.coordinates = GradientCoordinates::Natural;
  return result;
}

}  // namespace abcmle
