#include "abcmle/models/registry.hpp"

#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/models/alpha_stable.hpp"
#include "abcmle/models/g_and_k.hpp"
#include "abcmle/models/gaussian_surrogate.hpp"
#include "abcmle/models/sv_alpha_r.hpp"

namespace abcmle {

std::unique_ptr<Model> make_model(const std::string& name,
                                  const ModelOptions& options) {
  if (name == "alpha_stable")
    return std::make_unique<AlphaStableModel>(options.stable_exclusion_radius);
  if (name == "g_and_k") return std::make_unique<GAndKModel>(options.gk_c);
  if (name == "sv_alpha_r")
    return std::make_unique<SvAlphaRModel>(options.svar_with_drift,
                                           options.stable_exclusion_radius);
  if (name == "gaussian_surrogate")
    return std::make_unique<GaussianSurrogateModel>();
  std::ostringstream os;
  os << "unknown model '" << name << "'; registered models:";
  for (const auto& m : registered_models()) os << " " << m;
  throw ConfigError(os.str());
}

std::vector<std::string> registered_models() {
  return {"alpha_stable", "g_and_k", "sv_alpha_r", "gaussian_surrogate"};
}

}  // namespace abcmle
