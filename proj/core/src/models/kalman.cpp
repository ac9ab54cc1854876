#include "abcmle/models/kalman.hpp"

#include <cmath>
#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/kernel.hpp"

namespace abcmle {

double kalman_log_likelihood(std::span<const double> y, double phi,
                             double sigma_x2, double obs_var) {
  if (!(std::abs(phi) < 1.0) || !(sigma_x2 > 0.0) || !(obs_var > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "Kalman recursion requires |phi| < 1, sigma_x2 > 0, obs_var > 0; "
          "got phi="
       << phi << " sigma_x2=" << sigma_x2 << " obs_var=" << obs_var;
    throw DomainError(os.str());
  }
  double mean = 0.0;                            // predictive mean of x_t
  double var = sigma_x2 / (1.0 - phi * phi);    // predictive variance of x_t
  double ll = 0.0;
  for (double yt : y) {
    const double s = var + obs_var;             // innovation variance
    const double r = yt - mean;
    ll += -0.5 * (kLogTwoPi + std::log(s)) - 0.5 * r * r / s;
    const double gain = var / s;
    const double post_mean = mean + gain * r;
    const double post_var = (1.0 - gain) * var;
    mean = phi * post_mean;
    var = phi * phi * post_var + sigma_x2;
  }
  return ll;
}

}  // namespace abcmle
