#include "abcmle/models/g_and_k.hpp"

#include <sstream>

#include "abcmle/errors.hpp"

namespace abcmle {

namespace {

// AS 241 PPND16 coefficients (Wichura 1988).
constexpr double kA[8] = {
    3.3871328727963666080e+0, 1.3314166789178437745e+2,
    1.9715909503065514427e+3, 1.3731693765509461125e+4,
    4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {
    1.0,                      4.2313330701600911252e+1,
    6.8718700749205790830e+2, 5.3941960214247511077e+3,
    2.1213794301586595867e+4, 3.9307895800092710610e+4,
    2.8729085735721942674e+4, 5.2264952788528545610e+3};
constexpr double kC[8] = {
    1.42343711074968357734e+0, 4.63033784615654529590e+0,
    5.76949722146069140550e+0, 3.64784832476320460504e+0,
    1.27045825245236838258e+0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {
    1.0,                       2.05319162663775882187e+0,
    1.67638483018380384940e+0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kE[8] = {
    6.65790464350110377720e+0, 5.46378491116411436990e+0,
    1.78482653991729133580e+0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {
    1.0,                       5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-6,
    1.42151175831644588870e-15, 0.0};

double horner7(const double (&coef)[8], double r) {
  return ((((((coef[7] * r + coef[6]) * r + coef[5]) * r + coef[4]) * r +
            coef[3]) *
               r +
           coef[2]) *
              r +
          coef[1]) *
             r +
         coef[0];
}

}  // namespace

double standard_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "normal quantile argument must lie in (0, 1), got " << u;
    throw DomainError(os.str());
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner7(kA, r) / horner7(kB, r);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner7(kC, r) / horner7(kD, r);
  } else {
    r -= 5.0;
    value = horner7(kE, r) / horner7(kF, r);
  }
  return q < 0.0 ? -value : value;
}

double gk_quantile(double u, double g, double k, double a, double b,
                   double c) {
  const double x = standard_normal_quantile(u);
  // (1 - e^{-gx})/(1 + e^{-gx}) = tanh(g*x/2)
  const double skew = 1.0 + c * std::tanh(0.5 * g * x);
  const double spread = std::exp(k * std::log1p(x * x));
  return a + b * skew * spread * x;
}

double gk_quantile_grad(double u, double g, double k, double a, double b,
                        double c, std::span<double> grad) {
  const double x = standard_normal_quantile(u);
  const double x2 = x * x;
  const double l = std::tanh(0.5 * g * x);
  const double skew = 1.0 + c * l;
  const double log1px2 = std::log1p(x2);
  const double spread = std::exp(k * log1px2);
  const double bs = b * spread;
  grad[0] = bs * c * 0.5 * (1.0 - l * l) * x2;  // d/dg
  grad[1] = bs * skew * log1px2 * x;            // d/dk
  grad[2] = 1.0;                                // d/dA
  grad[3] = skew * spread * x;                  // d/dB
  return a + bs * skew * x;
}

GAndKModel::GAndKModel(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ConfigError("g-and-k skewness constant c must be positive");
  domain_.coordinates = {
      CoordinateDomain::unbounded("g"),
      CoordinateDomain::lower_bounded("k", -0.5, false),
      CoordinateDomain::unbounded("A"),
      CoordinateDomain::lower_bounded("B", 0.0, true),
  };
}

void GAndKModel::sample_aux(const ParameterVector&, std::span<const double>,
                            std::span<double> u, Rng& rng) const {
  u[0] = rng.uniform_open();
}

double GAndKModel::log_aux(const ParameterVector&, std::span<const double>,
                           std::span<const double>) const {
  return 0.0;  // Unif(0,1); independent of theta
}

double GAndKModel::tau(const ParameterVector& theta, std::span<const double>,
                       std::span<const double> u) const {
  return gk_quantile(u[0], theta[0], theta[1], theta[2], theta[3], c_);
}

void GAndKModel::grad_tau(const ParameterVector& theta,
                          std::span<const double> x,
                          std::span<const double> u,
                          std::span<double> grad) const {
  tau_with_grad(theta, x, u, grad);
}

double GAndKModel::tau_with_grad(const ParameterVector& theta,
                                 std::span<const double>,
                                 std::span<const double> u,
                                 std::span<double> grad) const {
  return gk_quantile_grad(u[0], theta[0], theta[1], theta[2], theta[3], c_,
                          grad);
}

}  // namespace abcmle
