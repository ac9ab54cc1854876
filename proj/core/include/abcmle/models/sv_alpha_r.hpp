#pragma once

#include <span>
#include <string>

#include "abcmle/model.hpp"

namespace abcmle {

// Stochastic volatility with symmetric heavy-tailed returns: the latent
// log-volatility follows an AR(1),
//
//   x_t = phi*x_{t-1} [+ delta] + s_t,   s_t ~ N(0, sigma_x^2),
//
// and observations are y_t = exp(x_t/2) * w_t with w_t a standardized
// symmetric stable draw of index alpha (generated from the same (u1, u2)
// auxiliary pair as the stable observation model, with skewness 0).
//
// theta = (alpha, phi, sigma_x2) — or (alpha, phi, sigma_x2, delta) when
// constructed with_drift, the variant used for fitting return residuals.
// The initial law is the stationary one: N(delta/(1-phi),
// sigma_x2/(1-phi^2)).
class SvAlphaRModel : public Model {
 public:
  explicit SvAlphaRModel(bool with_drift = false,
                         double exclusion_radius = 0.05);

  const std::string& name() const override { return name_; }
  const ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 1; }
  int aux_dim() const override { return 2; }
  bool uses_observation_transform() const override { return true; }

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

  ParameterVector clamp(const ParameterVector& theta) const override;

  bool with_drift() const { return with_drift_; }

 private:
  double drift(const ParameterVector& theta) const {
    return with_drift_ ? theta[3] : 0.0;
  }

  std::string name_ = "sv_alpha_r";
  ParameterDomain domain_;
  bool with_drift_;
  double exclusion_radius_;
};

}  // namespace abcmle
