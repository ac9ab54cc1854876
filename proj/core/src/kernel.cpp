#include "abcmle/kernel.hpp"

#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/gradient.hpp"
#include "abcmle/observation.hpp"

namespace abcmle {

SmoothingKernel::SmoothingKernel(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream os;
    os << "kernel scale epsilon must be strictly positive and finite, got "
       << epsilon;
    throw ConfigError(os.str());
  }
  log_norm_ = -std::log(epsilon) - 0.5 * kLogTwoPi;
}

double observation_center(const Model& model, const ParameterVector& theta,
                          std::span<const double> x, std::span<const double> u,
                          bool transformed) {
  const double value = model.tau(theta, x, u);
  if (!std::isfinite(value)) {
    std::vector<double> state(x.begin(), x.end());
    state.insert(state.end(), u.begin(), u.end());
    throw EvaluationError("observation map is non-finite", theta.values(),
                          std::move(state));
  }
  return transformed ? bounded_transform(value) : value;
}

double log_kernel_density(const Model& model, const ParameterVector& theta,
                          double y, std::span<const double> x,
                          std::span<const double> u,
                          const SmoothingKernel& kernel, bool transformed) {
  return kernel.log_density(y, observation_center(model, theta, x, u,
                                                  transformed));
}

void grad_log_kernel_density(const Model& model, const ParameterVector& theta,
                             double y, std::span<const double> x,
                             std::span<const double> u,
                             const SmoothingKernel& kernel, bool transformed,
                             std::span<double> grad) {
  const double tau = model.tau_with_grad(theta, x, u, grad);
  if (!std::isfinite(tau)) {
    std::vector<double> state(x.begin(), x.end());
    state.insert(state.end(), u.begin(), u.end());
    throw EvaluationError("observation map is non-finite", theta.values(),
                          std::move(state));
  }
  const double center = transformed ? bounded_transform(tau) : tau;
  double scale = kernel.dlog_dcenter(y, center);
  if (transformed) scale *= bounded_transform_derivative(tau);
  for (auto& g : grad) g *= scale;
}

}  // namespace abcmle
