#pragma once

#include <span>
#include <string>

#include "abcmle/model.hpp"

namespace abcmle {

// Linear-Gaussian oracle model: the same AR(1) latent chain as the
// volatility model but with the tractable observation map
//
//   y_t = x_t + sigma_y * u_t,   u_t ~ N(0, 1),
//
// so the kernel-smoothed observation process y^eps_t = x_t + sigma_y u_t +
// eps v_t is jointly Gaussian and its exact likelihood follows from a Kalman
// recursion with observation variance sigma_y^2 + eps^2 (see kalman.hpp).
// Everything the sampling-based machinery estimates on this model can be
// checked against closed form. theta = (phi, sigma_x2, sigma_y) with
// |phi| < 1, sigma_x2 > 0, sigma_y > 0. No bounded transform.
class GaussianSurrogateModel : public Model {
 public:
  GaussianSurrogateModel();

  const std::string& name() const override { return name_; }
  const ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 1; }
  int aux_dim() const override { return 1; }
  bool uses_observation_transform() const override { return false; }

  void sample_initial(const ParameterVector& theta, std::span<double> x,
                      Rng& rng) const override;
  double log_initial(const ParameterVector& theta,
                     std::span<const double> x) const override;
  void grad_log_initial(const ParameterVector& theta,
                        std::span<const double> x,
                        std::span<double> grad) const override;
  void sample_transition(const ParameterVector& theta,
                         std::span<const double> x_prev, std::span<double> x,
                         Rng& rng) const override;
  double log_transition(const ParameterVector& theta,
                        std::span<const double> x_prev,
                        std::span<const double> x) const override;
  void grad_log_transition(const ParameterVector& theta,
                           std::span<const double> x_prev,
                           std::span<const double> x,
                           std::span<double> grad) const override;

  void sample_aux(const ParameterVector& theta, std::span<const double> x,
                  std::span<double> u, Rng& rng) const override;
  double log_aux(const ParameterVector& theta, std::span<const double> x,
                 std::span<const double> u) const override;

  double tau(const ParameterVector& theta, std::span<const double> x,
             std::span<const double> u) const override;
  void grad_tau(const ParameterVector& theta, std::span<const double> x,
                std::span<const double> u,
                std::span<double> grad) const override;
  double tau_with_grad(const ParameterVector& theta, std::span<const double> x,
                       std::span<const double> u,
                       std::span<double> grad) const override;

 private:
  std::string name_ = "gaussian_surrogate";
  ParameterDomain domain_;
};

}  // namespace abcmle
