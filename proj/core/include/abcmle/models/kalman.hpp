#pragma once

#include <span>

namespace abcmle {

// Exact log-likelihood of the scalar linear-Gaussian state-space model
//
//   x_1 ~ N(0, sigma_x2/(1-phi^2)),  x_t = phi*x_{t-1} + N(0, sigma_x2),
//   y_t = x_t + N(0, obs_var),
//
// by the standard Kalman prediction/update recursion. For the surrogate
// observation model smoothed at kernel scale eps, pass
// obs_var = sigma_y^2 + eps^2; the result is the exact value the
// sampling-based likelihood estimator is unbiased for.
double kalman_log_likelihood(std::span<const double> y, double phi,
                             double sigma_x2, double obs_var);

}  // namespace abcmle
