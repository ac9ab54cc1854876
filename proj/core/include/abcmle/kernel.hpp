#pragma once

#include <cmath>
#include <span>

#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"

namespace abcmle {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// Standard normal CDF.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

// Gaussian smoothing kernel at a fixed scale: the observation density of the
// extended model is kernel.log_density(y, center) with center = T(tau(x, u)),
// where T is the bounded transform or the identity.
class SmoothingKernel {
 public:
  explicit SmoothingKernel(double epsilon);

  double epsilon() const { return epsilon_; }

  double log_density(double y, double center) const {
    const double r = (y - center) / epsilon_;
    return log_norm_ - 0.5 * r * r;
  }

  double cdf(double y, double center) const {
    return normal_cdf((y - center) / epsilon_);
  }

  // d/d(center) of log_density.
  double dlog_dcenter(double y, double center) const {
    return (y - center) / (epsilon_ * epsilon_);
  }

 private:
  double epsilon_;
  double log_norm_;  // -log(epsilon) - log(2*pi)/2
};

// Kernel center for one extended state: the observation map value, passed
// through the bounded transform when `transformed` is set. Throws
// EvaluationError if the map produces a non-finite value.
double observation_center(const Model& model, const ParameterVector& theta,
                          std::span<const double> x, std::span<const double> u,
                          bool transformed);

// log h_eps(y | x, u): kernel observation log-density of the extended model.
double log_kernel_density(const Model& model, const ParameterVector& theta,
                          double y, std::span<const double> x,
                          std::span<const double> u,
                          const SmoothingKernel& kernel, bool transformed);

// Gradient of log h_eps with respect to theta (natural coordinates):
//   (y - center)/eps^2 * T'(tau) * grad tau.
void grad_log_kernel_density(const Model& model, const ParameterVector& theta,
                             double y, std::span<const double> x,
                             std::span<const double> u,
                             const SmoothingKernel& kernel, bool transformed,
                             std::span<double> grad);

}  // namespace abcmle
