#pragma once

#include <cmath>
#include <span>
#include <string>

#include "abcmle/model.hpp"

namespace abcmle {

// Standardized stable draw via the classic trigonometric construction:
// with u1 ~ Unif(-pi/2, pi/2) and u2 ~ Exp(1),
//
//   zeta = S * sin(alpha*(u1 + B)) / cos(u1)^(1/alpha)
//            * (cos(u1 - alpha*(u1 + B)) / u2)^((1-alpha)/alpha)
//
// for alpha != 1, with B = atan(beta*tan(pi*alpha/2))/alpha and
// S = (1 + beta^2 tan^2(pi*alpha/2))^(1/(2*alpha)); and
//
//   zeta = (2/pi) * [ (pi/2 + beta*u1)*tan(u1)
//                     - beta*log(u2*cos(u1)/(pi/2 + beta*u1)) ]
//
// for alpha == 1. A stable(alpha, beta, mu, sigma) variate is then
// mu + sigma*zeta. At alpha == 2 the construction reduces to
// 2*sin(u1)*sqrt(u2) ~ Normal(0, 2).
inline double stable_standard_value(double alpha, double beta, double u1,
                                    double u2) {
  if (alpha == 1.0) {
    const double g = M_PI_2 + beta * u1;
    return M_2_PI * (g * std::tan(u1) - beta * std::log(u2 * std::cos(u1) / g));
  }
  const double t = std::tan(M_PI_2 * alpha);
  const double bt = beta * t;
  const double a_angle = alpha * u1 + std::atan(bt);  // alpha*(u1 + B)
  const double inv_alpha = 1.0 / alpha;
  const double s = std::exp(0.5 * inv_alpha * std::log1p(bt * bt));
  const double v = std::cos(u1);
  const double c = std::cos(u1 - a_angle);
  const double p = inv_alpha - 1.0;  // (1 - alpha)/alpha
  return s * std::sin(a_angle) * std::pow(v, -inv_alpha) *
         std::pow(c / u2, p);
}

// Value plus derivatives of the standardized draw with respect to alpha and
// beta, computed together because they share every expensive factor. Only
// defined for alpha != 1 (optimizer iterates are kept away from alpha == 1
// by the exclusion clamp).
inline double stable_standard_value_grad(double alpha, double beta, double u1,
                                         double u2, double& d_alpha,
                                         double& d_beta) {
  const double t = std::tan(M_PI_2 * alpha);
  const double bt = beta * t;
  const double one_bt2 = 1.0 + bt * bt;
  const double inv_alpha = 1.0 / alpha;
  const double a_angle = alpha * u1 + std::atan(bt);
  const double sin_a = std::sin(a_angle);
  const double cos_a = std::cos(a_angle);
  const double v = std::cos(u1);
  const double log_v = std::log(v);
  const double c = std::cos(u1 - a_angle);
  const double s1 = std::sin(u1 - a_angle);
  const double p = inv_alpha - 1.0;
  const double log_c_u2 = std::log(c / u2);

  const double s = std::exp(0.5 * inv_alpha * std::log1p(bt * bt));
  const double f3 = std::exp(-inv_alpha * log_v);   // cos(u1)^(-1/alpha)
  const double f4 = std::exp(p * log_c_u2);         // (c/u2)^p
  const double p134 = s * f3 * f4;
  const double value = p134 * sin_a;

  // d/d alpha of tan(pi*alpha/2) is (pi/2)*(1 + t^2).
  const double dt_dalpha = M_PI_2 * (1.0 + t * t);
  const double dlogs_dalpha = -0.5 * inv_alpha * inv_alpha * std::log(one_bt2) +
                              0.5 * inv_alpha * 2.0 * bt * beta * dt_dalpha /
                                  one_bt2;
  const double da_dalpha = u1 + beta * dt_dalpha / one_bt2;
  const double da_dbeta = t / one_bt2;
  const double dlogs_dbeta = bt * t * inv_alpha / one_bt2;

  // Product rule over S, sin(A), cos(u1)^(-1/alpha), (c/u2)^p; the sin(A)
  // factor is kept separate so nothing divides by sin(A) near its zeros.
  const double inv_a2 = inv_alpha * inv_alpha;
  d_alpha = value * (dlogs_dalpha + log_v * inv_a2 - log_c_u2 * inv_a2 +
                     p * s1 * da_dalpha / c) +
            p134 * cos_a * da_dalpha;
  d_beta = value * (dlogs_dbeta + p * s1 * da_dbeta / c) +
           p134 * cos_a * da_dbeta;
  return value;
}

// Observation model: y ~ stable(alpha, beta, mu, sigma), i.i.d. across time
// (no latent chain). theta = (alpha, beta, mu, sigma) with
// alpha in (0, 2], beta in [-1, 1], mu unbounded, sigma in [0, inf).
// Likelihood evaluation defaults to the bounded observation transform:
// without it the score coordinate for sigma has infinite variance whenever
// alpha < 2.
class AlphaStableModel : public Model {
 public:
  // Optimizer iterates are clamped out of (1 - exclusion_radius,
  // 1 + exclusion_radius) around the removed line alpha = 1.
  explicit AlphaStableModel(double exclusion_radius = 0.05);

  const std::string& name() const override { return name_; }
  const ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 0; }
  int aux_dim() const override { return 2; }
  bool uses_observation_transform() const override { return true; }

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

  double exclusion_radius() const { return exclusion_radius_; }

 private:
  std::string name_ = "alpha_stable";
  ParameterDomain domain_;
  double exclusion_radius_;
};

}  // namespace abcmle
