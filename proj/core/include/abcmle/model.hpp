#pragma once

#include <span>
#include <string>
#include <vector>

#include "abcmle/parameters.hpp"
#include "abcmle/rng.hpp"

namespace abcmle {

// A state-space model whose observation density is intractable but whose
// observations can be written as a deterministic map of the latent state and
// an auxiliary random draw:
//
//   x_1 ~ initial,   x_t | x_{t-1} ~ transition        (latent chain)
//   u_t | x_t ~ aux                                    (auxiliary variable)
//   y_t = tau_theta(x_t, u_t)                          (observation map)
//
// Models without a latent chain (pure i.i.d. observation models) report
// state_dim() == 0 and never receive calls to the chain functions.
//
// All gradient outputs are with respect to the natural parameter coordinates
// and must fill exactly theta_dim() entries. Evaluation functions are const
// and touch no shared mutable state, so a single model instance may be used
// from many streams at once; randomness always comes in through the caller's
// Rng.
class Model {
 public:
  virtual ~Model() = default;

  virtual const std::string& name() const = 0;
  virtual const ParameterDomain& domain() const = 0;
  virtual int state_dim() const = 0;  // latent dimension d_x (0 for i.i.d.)
  virtual int aux_dim() const = 0;    // auxiliary dimension d_u
  int theta_dim() const { return static_cast<int>(domain().size()); }

  // True if likelihood evaluation for this model should, by default, pass
  // observations and observation map through the bounded transform that
  // keeps score variances finite (see observation.hpp).
  virtual bool uses_observation_transform() const = 0;

  // --- Latent chain (state_dim() > 0 only) -------------------------------
  virtual void sample_initial(const ParameterVector& theta,
                              std::span<double> x, Rng& rng) const;
  virtual double log_initial(const ParameterVector& theta,
                             std::span<const double> x) const;
  virtual void grad_log_initial(const ParameterVector& theta,
                                std::span<const double> x,
                                std::span<double> grad) const;
  virtual void sample_transition(const ParameterVector& theta,
                                 std::span<const double> x_prev,
                                 std::span<double> x, Rng& rng) const;
  virtual double log_transition(const ParameterVector& theta,
                                std::span<const double> x_prev,
                                std::span<const double> x) const;
  virtual void grad_log_transition(const ParameterVector& theta,
                                   std::span<const double> x_prev,
                                   std::span<const double> x,
                                   std::span<double> grad) const;

  // --- Auxiliary variable -------------------------------------------------
  virtual void sample_aux(const ParameterVector& theta,
                          std::span<const double> x, std::span<double> u,
                          Rng& rng) const = 0;
  virtual double log_aux(const ParameterVector& theta,
                         std::span<const double> x,
                         std::span<const double> u) const = 0;
  // Default: the auxiliary law does not depend on theta, gradient is zero.
  // Models overriding aux_depends_on_theta() must also override this.
  virtual void grad_log_aux(const ParameterVector& theta,
                            std::span<const double> x,
                            std::span<const double> u,
                            std::span<double> grad) const;
  virtual bool aux_depends_on_theta() const { return false; }

  // --- Observation map ----------------------------------------------------
  virtual double tau(const ParameterVector& theta, std::span<const double> x,
                     std::span<const double> u) const = 0;
  virtual void grad_tau(const ParameterVector& theta,
                        std::span<const double> x, std::span<const double> u,
                        std::span<double> grad) const = 0;
  // Fused value+gradient; override where the two share expensive factors.
  virtual double tau_with_grad(const ParameterVector& theta,
                               std::span<const double> x,
                               std::span<const double> u,
                               std::span<double> grad) const;

  // Projection applied to iterates after every optimizer update; identity by
  // default. Models with excluded neighbourhoods (e.g. a removed line in the
  // interior of the stability-index range) clamp back to the nearest
  // admissible point here.
  virtual ParameterVector clamp(const ParameterVector& theta) const;

  // Draw n raw observations from the model, advancing the latent chain when
  // there is one. Returns exactly what the data-generating process emits:
  // no noise corruption and no bounded transform.
  std::vector<double> simulate(const ParameterVector& theta, long n,
                               Rng& rng) const;
};

}  // namespace abcmle
