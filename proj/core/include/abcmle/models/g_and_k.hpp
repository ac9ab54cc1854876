#pragma once

#include <cmath>
#include <span>
#include <string>

#include "abcmle/model.hpp"

namespace abcmle {

// Standard normal quantile (probit). Wichura's AS 241 PPND16 rational
// approximation: three regimes (central, moderate tail, far tail), absolute
// error below 1e-15 across (0, 1) — far tighter than the 1e-9 this code
// relies on. Arguments outside (0, 1) throw.
double standard_normal_quantile(double u);

// Quantile function of the g-and-k distribution at probability u:
//   Q(u) = A + B * [1 + c*(1 - e^{-g x})/(1 + e^{-g x})] * (1 + x^2)^k * x
// with x = standard_normal_quantile(u). theta = (g, k, A, B); c is the
// conventional fixed constant 0.8.
double gk_quantile(double u, double g, double k, double a, double b,
                   double c = 0.8);

// Value plus partials with respect to (g, k, A, B); grad must have size 4.
double gk_quantile_grad(double u, double g, double k, double a, double b,
                        double c, std::span<double> grad);

// Observation model: y = Q_theta(U) with U ~ Unif(0,1), i.i.d. across time
// (no latent chain). theta = (g, k, A, B) with g unbounded, k in (-0.5, inf),
// A unbounded, B in [0, inf). Estimation defaults to the bounded observation
// transform: the (1 + x^2)^k factor otherwise produces very-high-variance
// score estimates.
class GAndKModel : public Model {
 public:
  explicit GAndKModel(double c = 0.8);

  const std::string& name() const override { return name_; }
  const ParameterDomain& domain() const override { return domain_; }
  int state_dim() const override { return 0; }
  int aux_dim() const override { return 1; }
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

  double c() const { return c_; }

 private:
  std::string name_ = "g_and_k";
  ParameterDomain domain_;
  double c_;
};

}  // namespace abcmle
