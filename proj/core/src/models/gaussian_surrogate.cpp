#include "abcmle/models/gaussian_surrogate.hpp"

#include <cmath>

#include "abcmle/kernel.hpp"

namespace abcmle {

GaussianSurrogateModel::GaussianSurrogateModel() {
  domain_.coordinates = {
      CoordinateDomain::interval("phi", -1.0, 1.0, false, false),
      CoordinateDomain::lower_bounded("sigma_x2", 0.0, false),
      CoordinateDomain::lower_bounded("sigma_y", 0.0, false),
  };
}

void GaussianSurrogateModel::sample_initial(const ParameterVector& theta,
                                            std::span<double> x,
                                            Rng& rng) const {
  const double phi = theta[0];
  x[0] = std::sqrt(theta[1] / (1.0 - phi * phi)) * rng.normal();
}

double GaussianSurrogateModel::log_initial(const ParameterVector& theta,
                                           std::span<const double> x) const {
  const double phi = theta[0];
  const double var = theta[1] / (1.0 - phi * phi);
  return -0.5 * (kLogTwoPi + std::log(var)) - 0.5 * x[0] * x[0] / var;
}

void GaussianSurrogateModel::grad_log_initial(const ParameterVector& theta,
                                              std::span<const double> x,
                                              std::span<double> grad) const {
  const double phi = theta[0];
  const double s2 = theta[1];
  const double one_mphi2 = 1.0 - phi * phi;
  const double var = s2 / one_mphi2;
  const double dl_dvar = -0.5 / var + 0.5 * x[0] * x[0] / (var * var);
  grad[0] = dl_dvar * s2 * 2.0 * phi / (one_mphi2 * one_mphi2);
  grad[1] = dl_dvar / one_mphi2;
  grad[2] = 0.0;
}

void GaussianSurrogateModel::sample_transition(const ParameterVector& theta,
                                               std::span<const double> x_prev,
                                               std::span<double> x,
                                               Rng& rng) const {
  x[0] = theta[0] * x_prev[0] + std::sqrt(theta[1]) * rng.normal();
}

double GaussianSurrogateModel::log_transition(const ParameterVector& theta,
                                              std::span<const double> x_prev,
                                              std::span<const double> x) const {
  const double s2 = theta[1];
  const double r = x[0] - theta[0] * x_prev[0];
  return -0.5 * (kLogTwoPi + std::log(s2)) - 0.5 * r * r / s2;
}

void GaussianSurrogateModel::grad_log_transition(const ParameterVector& theta,
                                                 std::span<const double> x_prev,
                                                 std::span<const double> x,
                                                 std::span<double> grad) const {
  const double s2 = theta[1];
  const double r = x[0] - theta[0] * x_prev[0];
  grad[0] = r * x_prev[0] / s2;
  grad[1] = -0.5 / s2 + 0.5 * r * r / (s2 * s2);
  grad[2] = 0.0;
}

void GaussianSurrogateModel::sample_aux(const ParameterVector&,
                                        std::span<const double>,
                                        std::span<double> u, Rng& rng) const {
  u[0] = rng.normal();
}

double GaussianSurrogateModel::log_aux(const ParameterVector&,
                                       std::span<const double>,
                                       std::span<const double> u) const {
  return -0.5 * kLogTwoPi - 0.5 * u[0] * u[0];
}

double GaussianSurrogateModel::tau(const ParameterVector& theta,
                                   std::span<const double> x,
                                   std::span<const double> u) const {
  return x[0] + theta[2] * u[0];
}

void GaussianSurrogateModel::grad_tau(const ParameterVector&,
                                      std::span<const double>,
                                      std::span<const double> u,
                                      std::span<double> grad) const {
  grad[0] = 0.0;
  grad[1] = 0.0;
  grad[2] = u[0];
}

double GaussianSurrogateModel::tau_with_grad(const ParameterVector& theta,
                                             std::span<const double> x,
                                             std::span<const double> u,
                                             std::span<double> grad) const {
  grad_tau(theta, x, u, grad);
  return x[0] + theta[2] * u[0];
}

}  // namespace abcmle
