#include "abcmle/models/sv_alpha_r.hpp"

#include <cmath>
#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/kernel.hpp"
#include "abcmle/models/alpha_stable.hpp"

namespace abcmle {

SvAlphaRModel::SvAlphaRModel(bool with_drift, double exclusion_radius)
    : with_drift_(with_drift), exclusion_radius_(exclusion_radius) {
  if (!(exclusion_radius > 0.0) || exclusion_radius >= 0.5) {
    std::ostringstream os;
    os << "stability-index exclusion radius must lie in (0, 0.5), got "
       << exclusion_radius;
    throw ConfigError(os.str());
  }
  domain_.coordinates = {
      CoordinateDomain::interval("alpha", 0.0, 2.0, false, true),
      CoordinateDomain::interval("phi", -1.0, 1.0, false, false),
      CoordinateDomain::lower_bounded("sigma_x2", 0.0, false),
  };
  if (with_drift_)
    domain_.coordinates.push_back(CoordinateDomain::unbounded("delta"));
}

void SvAlphaRModel::sample_initial(const ParameterVector& theta,
                                   std::span<double> x, Rng& rng) const {
  const double phi = theta[1];
  const double mean = drift(theta) / (1.0 - phi);
  const double sd = std::sqrt(theta[2] / (1.0 - phi * phi));
  x[0] = mean + sd * rng.normal();
}

double SvAlphaRModel::log_initial(const ParameterVector& theta,
                                  std::span<const double> x) const {
  const double phi = theta[1];
  const double mean = drift(theta) / (1.0 - phi);
  const double var = theta[2] / (1.0 - phi * phi);
  const double r = x[0] - mean;
  return -0.5 * (kLogTwoPi + std::log(var)) - 0.5 * r * r / var;
}

void SvAlphaRModel::grad_log_initial(const ParameterVector& theta,
                                     std::span<const double> x,
                                     std::span<double> grad) const {
  const double phi = theta[1];
  const double s2 = theta[2];
  const double delta = drift(theta);
  const double one_mphi = 1.0 - phi;
  const double one_mphi2 = 1.0 - phi * phi;
  const double mean = delta / one_mphi;
  const double var = s2 / one_mphi2;
  const double r = x[0] - mean;
  // Chain rule through the stationary mean/variance.
  const double dl_dmean = r / var;
  const double dl_dvar = -0.5 / var + 0.5 * r * r / (var * var);
  const double dmean_dphi = delta / (one_mphi * one_mphi);
  const double dvar_dphi = s2 * 2.0 * phi / (one_mphi2 * one_mphi2);
  grad[0] = 0.0;  // alpha does not enter the chain
  grad[1] = dl_dmean * dmean_dphi + dl_dvar * dvar_dphi;
  grad[2] = dl_dvar / one_mphi2;
  if (with_drift_) grad[3] = dl_dmean / one_mphi;
}

void SvAlphaRModel::sample_transition(const ParameterVector& theta,
                                      std::span<const double> x_prev,
                                      std::span<double> x, Rng& rng) const {
  x[0] = theta[1] * x_prev[0] + drift(theta) +
         std::sqrt(theta[2]) * rng.normal();
}

double SvAlphaRModel::log_transition(const ParameterVector& theta,
                                     std::span<const double> x_prev,
                                     std::span<const double> x) const {
  const double s2 = theta[2];
  const double r = x[0] - theta[1] * x_prev[0] - drift(theta);
  return -0.5 * (kLogTwoPi + std::log(s2)) - 0.5 * r * r / s2;
}

void SvAlphaRModel::grad_log_transition(const ParameterVector& theta,
                                        std::span<const double> x_prev,
                                        std::span<const double> x,
                                        std::span<double> grad) const {
  const double s2 = theta[2];
  const double r = x[0] - theta[1] * x_prev[0] - drift(theta);
  grad[0] = 0.0;
  grad[1] = r * x_prev[0] / s2;
  grad[2] = -0.5 / s2 + 0.5 * r * r / (s2 * s2);
  if (with_drift_) grad[3] = r / s2;
}

void SvAlphaRModel::sample_aux(const ParameterVector&, std::span<const double>,
                               std::span<double> u, Rng& rng) const {
  u[0] = (rng.uniform_open() - 0.5) * M_PI;
  u[1] = rng.exponential();
}

double SvAlphaRModel::log_aux(const ParameterVector&, std::span<const double>,
                              std::span<const double> u) const {
  return -std::log(M_PI) - u[1];
}

double SvAlphaRModel::tau(const ParameterVector& theta,
                          std::span<const double> x,
                          std::span<const double> u) const {
  return std::exp(0.5 * x[0]) *
         stable_standard_value(theta[0], 0.0, u[0], u[1]);
}

void SvAlphaRModel::grad_tau(const ParameterVector& theta,
                             std::span<const double> x,
                             std::span<const double> u,
                             std::span<double> grad) const {
  tau_with_grad(theta, x, u, grad);
}

double SvAlphaRModel::tau_with_grad(const ParameterVector& theta,
                                    std::span<const double> x,
                                    std::span<const double> u,
                                    std::span<double> grad) const {
  const double alpha = theta[0];
  if (alpha == 1.0)
    throw EvaluationError(
        "observation-map gradient is not defined on the removed line "
        "alpha = 1",
        theta.values(), {x[0], u[0], u[1]});
  double d_alpha, d_beta;
  const double zeta =
      stable_standard_value_grad(alpha, 0.0, u[0], u[1], d_alpha, d_beta);
  const double vol = std::exp(0.5 * x[0]);
  grad[0] = vol * d_alpha;
  grad[1] = 0.0;
  grad[2] = 0.0;
  if (with_drift_) grad[3] = 0.0;
  return vol * zeta;
}

ParameterVector SvAlphaRModel::clamp(const ParameterVector& theta) const {
  const double alpha = theta[0];
  const double r = exclusion_radius_;
  if (std::abs(alpha - 1.0) >= r) return theta;
  std::vector<double> v = theta.values();
  v[0] = alpha < 1.0 ? 1.0 - r : 1.0 + r;
  return theta.with_values(std::move(v));
}

}  // namespace abcmle
