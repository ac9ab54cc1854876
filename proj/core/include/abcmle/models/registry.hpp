#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abcmle/model.hpp"

namespace abcmle {

// Knobs the built-in models accept; ignored by models they do not apply to.
struct ModelOptions {
  double stable_exclusion_radius = 0.05;  // alpha exclusion around 1
  double gk_c = 0.8;                      // g-and-k fixed skewness constant
  bool svar_with_drift = false;           // volatility chain drift term
};

// Construct a built-in model by its registered name: "alpha_stable",
// "g_and_k", "sv_alpha_r", or "gaussian_surrogate". Unknown names throw
// ConfigError listing the registered set.
std::unique_ptr<Model> make_model(const std::string& name,
                                  const ModelOptions& options = {});

std::vector<std::string> registered_models();

}  // namespace abcmle
