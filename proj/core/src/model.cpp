#include "abcmle/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "abcmle/errors.hpp"
#include "abcmle/gradient.hpp"

namespace abcmle {

namespace {
[[noreturn]] void no_latent_state(const Model& m, const char* op) {
  throw std::logic_error("model '" + m.name() + "' has no latent state; " +
                         op + " must not be called");
}
}  // namespace

void Model::sample_initial(const ParameterVector&, std::span<double>,
                           Rng&) const {
  no_latent_state(*this, "sample_initial");
}

double Model::log_initial(const ParameterVector&,
                          std::span<const double>) const {
  no_latent_state(*this, "log_initial");
}

void Model::grad_log_initial(const ParameterVector&, std::span<const double>,
                             std::span<double>) const {
  no_latent_state(*this, "grad_log_initial");
}

void Model::sample_transition(const ParameterVector&, std::span<const double>,
                              std::span<double>, Rng&) const {
  no_latent_state(*this, "sample_transition");
}

double Model::log_transition(const ParameterVector&, std::span<const double>,
                             std::span<const double>) const {
  no_latent_state(*this, "log_transition");
}

void Model::grad_log_transition(const ParameterVector&,
                                std::span<const double>,
                                std::span<const double>,
                                std::span<double>) const {
  no_latent_state(*this, "grad_log_transition");
}

void Model::grad_log_aux(const ParameterVector&, std::span<const double>,
                         std::span<const double>, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
}

double Model::tau_with_grad(const ParameterVector& theta,
                            std::span<const double> x,
                            std::span<const double> u,
                            std::span<double> grad) const {
  grad_tau(theta, x, u, grad);
  return tau(theta, x, u);
}

ParameterVector Model::clamp(const ParameterVector& theta) const {
  return theta;
}

std::vector<double> Model::simulate(const ParameterVector& theta, long n,
                                    Rng& rng) const {
  if (n <= 0) throw ConfigError("simulate requires a positive sample count");
  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(state_dim()));
  std::vector<double> x_next(x.size());
  std::vector<double> u(static_cast<std::size_t>(aux_dim()));
  for (long t = 0; t < n; ++t) {
    if (state_dim() > 0) {
      if (t == 0)
        sample_initial(theta, x, rng);
      else {
        sample_transition(theta, x, x_next, rng);
        std::swap(x, x_next);
      }
    }
    sample_aux(theta, x, u, rng);
    const double value = tau(theta, x, u);
    check_finite(value, "simulated observation", theta.values(), x);
    y[static_cast<std::size_t>(t)] = value;
  }
  return y;
}

}  // namespace abcmle
