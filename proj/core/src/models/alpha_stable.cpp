#include "abcmle/models/alpha_stable.hpp"

#include <sstream>

#include "abcmle/errors.hpp"

namespace abcmle {

AlphaStableModel::AlphaStableModel(double exclusion_radius)
    : exclusion_radius_(exclusion_radius) {
  if (!(exclusion_radius > 0.0) || exclusion_radius >= 0.5) {
    std::ostringstream os;
    os << "stability-index exclusion radius must lie in (0, 0.5), got "
       << exclusion_radius;
    throw ConfigError(os.str());
  }
  domain_.coordinates = {
      CoordinateDomain::interval("alpha", 0.0, 2.0, false, true),
      CoordinateDomain::interval("beta", -1.0, 1.0, true, true),
      CoordinateDomain::unbounded("mu"),
      CoordinateDomain::lower_bounded("sigma", 0.0, true),
  };
}

void AlphaStableModel::sample_aux(const ParameterVector&,
                                  std::span<const double>, std::span<double> u,
                                  Rng& rng) const {
  u[0] = (rng.uniform_open() - 0.5) * M_PI;  // Unif(-pi/2, pi/2), open
  u[1] = rng.exponential();
}

double AlphaStableModel::log_aux(const ParameterVector&,
                                 std::span<const double>,
                                 std::span<const double> u) const {
  // u1 ~ Unif(-pi/2, pi/2), u2 ~ Exp(1); independent of theta.
  return -std::log(M_PI) - u[1];
}

double AlphaStableModel::tau(const ParameterVector& theta,
                             std::span<const double>,
                             std::span<const double> u) const {
  return theta[2] + theta[3] * stable_standard_value(theta[0], theta[1], u[0],
                                                     u[1]);
}

void AlphaStableModel::grad_tau(const ParameterVector& theta,
                                std::span<const double> x,
                                std::span<const double> u,
                                std::span<double> grad) const {
  tau_with_grad(theta, x, u, grad);
}

double AlphaStableModel::tau_with_grad(const ParameterVector& theta,
                                       std::span<const double>,
                                       std::span<const double> u,
                                       std::span<double> grad) const {
  const double alpha = theta[0];
  if (alpha == 1.0)
    throw EvaluationError(
        "observation-map gradient is not defined on the removed line "
        "alpha = 1",
        theta.values(), {u[0], u[1]});
  double d_alpha, d_beta;
  const double zeta =
      stable_standard_value_grad(alpha, theta[1], u[0], u[1], d_alpha, d_beta);
  const double sigma = theta[3];
  grad[0] = sigma * d_alpha;
  grad[1] = sigma * d_beta;
  grad[2] = 1.0;
  grad[3] = zeta;
  return theta[2] + sigma * zeta;
}

ParameterVector AlphaStableModel::clamp(const ParameterVector& theta) const {
  const double alpha = theta[0];
  const double r = exclusion_radius_;
  if (std::abs(alpha - 1.0) >= r) return theta;
  std::vector<double> v = theta.values();
  // Nearest admissible point; ties resolve upward.
  v[0] = alpha < 1.0 ? 1.0 - r : 1.0 + r;
  return theta.with_values(std::move(v));
}

}  // namespace abcmle
