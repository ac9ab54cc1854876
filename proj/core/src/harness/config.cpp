#include "abcmle/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"

namespace abcmle {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, const std::string& message) {
  throw ConfigError("config " + source + ": " + message);
}

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& source, const std::string& where) {
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      fail(source, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

const json* find(const json& object, const char* key) {
  const auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

double as_double(const json& value, const std::string& source,
                 const std::string& name) {
  if (!value.is_number()) fail(source, "'" + name + "' must be a number");
  return value.get<double>();
}

long as_long(const json& value, const std::string& source,
             const std::string& name) {
  if (!value.is_number_integer()) fail(source, "'" + name + "' must be an integer");
  return value.get<long>();
}

bool as_bool(const json& value, const std::string& source,
             const std::string& name) {
  if (!value.is_boolean()) fail(source, "'" + name + "' must be a boolean");
  return value.get<bool>();
}

std::string as_string(const json& value, const std::string& source,
                      const std::string& name) {
  if (!value.is_string()) fail(source, "'" + name + "' must be a string");
  return value.get<std::string>();
}

std::vector<double> as_double_array(const json& value, const std::string& source,
                                    const std::string& name) {
  if (!value.is_array()) fail(source, "'" + name + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const json& entry : value) {
    if (!entry.is_number()) fail(source, "'" + name + "' must contain only numbers");
    out.push_back(entry.get<double>());
  }
  return out;
}

void check_theta(const std::vector<double>& values, const ParameterDomain& domain,
                 const std::string& source, const std::string& name) {
  if (values.size() != domain.size()) {
    std::ostringstream os;
    os << "'" << name << "' has " << values.size()
       << " coordinates but the model expects " << domain.size();
    fail(source, os.str());
  }
  try {
    ParameterVector check(values, domain);
  } catch (const DomainError& error) {
    fail(source, "'" + name + "' is outside the parameter domain: " +
                     error.what());
  }
}

}  // namespace

std::string mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::Batch: return "batch";
    case ExperimentMode::Online: return "online";
    case ExperimentMode::LikelihoodEval: return "likelihood-eval";
    case ExperimentMode::PitCheck: return "pit-check";
    case ExperimentMode::GradientHistogram: return "gradient-histogram";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& source_name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& error) {
    fail(source_name, std::string("invalid JSON: ") + error.what());
  }
  if (!root.is_object()) fail(source_name, "top level must be a JSON object");

  reject_unknown_keys(
      root,
      {"mode", "model", "model_options", "theta_star", "dataset", "preprocess",
       "theta0", "theta_eval", "epsilon", "particle_count", "observation_count",
       "noisy", "transform", "score_method", "schedule", "iterations",
       "average_last", "clip_factor", "replicates", "seed", "output_dir",
       "record_stride", "emit_timing", "precenter_location",
       "precenter_coordinate", "precenter_window", "comment"},
      source_name, "the config");

  ExperimentConfig config;
  config.source_path = source_name;
  config.config_hash = hex64(fnv1a64(root.dump()));

  // Mode and model.
  const json* mode = find(root, "mode");
  if (!mode) fail(source_name, "'mode' is required");
  const std::string mode_text = as_string(*mode, source_name, "mode");
  if (mode_text == "batch") config.mode = ExperimentMode::Batch;
  else if (mode_text == "online") config.mode = ExperimentMode::Online;
  else if (mode_text == "likelihood-eval") config.mode = ExperimentMode::LikelihoodEval;
  else if (mode_text == "pit-check") config.mode = ExperimentMode::PitCheck;
  else if (mode_text == "gradient-histogram") config.mode = ExperimentMode::GradientHistogram;
  else {
    fail(source_name,
         "unknown mode '" + mode_text +
             "'; expected batch, online, likelihood-eval, pit-check, or "
             "gradient-histogram");
  }

  const json* model = find(root, "model");
  if (!model) fail(source_name, "'model' is required");
  config.model = as_string(*model, source_name, "model");
  bool registered = false;
  for (const std::string& name : registered_models()) {
    if (name == config.model) registered = true;
  }
  if (!registered) {
    std::string names;
    for (const std::string& name : registered_models()) {
      if (!names.empty()) names += ", ";
      names += name;
    }
    fail(source_name,
         "unknown model '" + config.model + "'; registered models: " + names);
  }

  if (const json* options = find(root, "model_options")) {
    if (!options->is_object())
      fail(source_name, "'model_options' must be an object");
    reject_unknown_keys(*options,
                        {"stable_exclusion_radius", "gk_c", "svar_with_drift"},
                        source_name, "model_options");
    if (const json* v = find(*options, "stable_exclusion_radius")) {
      config.model_options.stable_exclusion_radius =
          as_double(*v, source_name, "stable_exclusion_radius");
    }
    if (const json* v = find(*options, "gk_c")) {
      config.model_options.gk_c = as_double(*v, source_name, "gk_c");
    }
    if (const json* v = find(*options, "svar_with_drift")) {
      config.model_options.svar_with_drift =
          as_bool(*v, source_name, "svar_with_drift");
    }
  }

  // The model instance is needed for dimension and domain checks.
  const std::unique_ptr<Model> instance =
      make_model(config.model, config.model_options);
  const ParameterDomain& domain = instance->domain();

  // Data source: exactly one of theta_star (synthetic) or dataset.
  if (const json* v = find(root, "theta_star")) {
    config.theta_star = as_double_array(*v, source_name, "theta_star");
    check_theta(config.theta_star, domain, source_name, "theta_star");
  }
  if (const json* v = find(root, "dataset")) {
    config.dataset = as_string(*v, source_name, "dataset");
    if (config.dataset.empty()) fail(source_name, "'dataset' must not be empty");
  }
  if (config.theta_star.empty() == config.dataset.empty()) {
    fail(source_name,
         "exactly one of 'theta_star' (synthetic data) or 'dataset' "
         "(file input) is required");
  }

  if (const json* v = find(root, "preprocess")) {
    if (!v->is_object()) fail(source_name, "'preprocess' must be an object");
    reject_unknown_keys(*v, {"log_returns", "ar1_residuals"}, source_name,
                        "preprocess");
    if (const json* p = find(*v, "log_returns"))
      config.preprocess.log_returns = as_bool(*p, source_name, "log_returns");
    if (const json* p = find(*v, "ar1_residuals"))
      config.preprocess.ar1_residuals =
          as_bool(*p, source_name, "ar1_residuals");
    if ((config.preprocess.log_returns || config.preprocess.ar1_residuals) &&
        config.dataset.empty()) {
      fail(source_name, "'preprocess' applies only to dataset input");
    }
  }

  // Scalars.
  const json* epsilon = find(root, "epsilon");
  if (!epsilon) fail(source_name, "'epsilon' is required");
  config.epsilon = as_double(*epsilon, source_name, "epsilon");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    fail(source_name,
         "'epsilon' must be positive and finite; there is no epsilon = 0 "
         "limit mode");
  }

  const json* particles = find(root, "particle_count");
  if (!particles) fail(source_name, "'particle_count' is required");
  config.particle_count =
      static_cast<int>(as_long(*particles, source_name, "particle_count"));
  if (config.particle_count < 2) {
    fail(source_name, "'particle_count' must be at least 2");
  }

  if (const json* v = find(root, "observation_count")) {
    config.observation_count = as_long(*v, source_name, "observation_count");
    if (config.observation_count < 1) {
      fail(source_name, "'observation_count' must be at least 1");
    }
  }
  if (!config.theta_star.empty() && config.observation_count == 0) {
    fail(source_name, "synthetic data requires 'observation_count'");
  }

  if (const json* v = find(root, "noisy")) {
    config.noisy = as_bool(*v, source_name, "noisy");
  }

  if (const json* v = find(root, "transform")) {
    const std::string text = as_string(*v, source_name, "transform");
    if (text == "model") config.transform.reset();
    else if (text == "on") config.transform = true;
    else if (text == "off") config.transform = false;
    else {
      fail(source_name,
           "'transform' must be \"model\", \"on\", or \"off\", got \"" + text +
               "\"");
    }
  }

  if (const json* v = find(root, "score_method")) {
    const std::string text = as_string(*v, source_name, "score_method");
    if (text == "path_space") config.score_method = ScoreMethod::PathSpace;
    else if (text == "marginal") config.score_method = ScoreMethod::Marginal;
    else {
      fail(source_name,
           "'score_method' must be \"path_space\" or \"marginal\", got \"" +
               text + "\"");
    }
  }

  if (const json* v = find(root, "schedule")) {
    if (!v->is_object()) fail(source_name, "'schedule' must be an object");
    reject_unknown_keys(*v, {"a", "b", "t0", "multipliers"}, source_name,
                        "schedule");
    if (const json* p = find(*v, "a"))
      config.schedule.a = as_double(*p, source_name, "schedule.a");
    if (const json* p = find(*v, "b"))
      config.schedule.b = as_double(*p, source_name, "schedule.b");
    if (const json* p = find(*v, "t0"))
      config.schedule.t0 = as_long(*p, source_name, "schedule.t0");
    if (const json* p = find(*v, "multipliers"))
      config.schedule.multipliers =
          as_double_array(*p, source_name, "schedule.multipliers");
  }
  try {
    validate_schedule(config.schedule, domain.size());
  } catch (const ConfigError& error) {
    fail(source_name, error.what());
  }

  if (const json* v = find(root, "iterations")) {
    config.iterations = as_long(*v, source_name, "iterations");
    if (config.iterations < 1) fail(source_name, "'iterations' must be at least 1");
  }
  if (const json* v = find(root, "average_last")) {
    config.average_last = as_long(*v, source_name, "average_last");
    if (config.average_last < 1)
      fail(source_name, "'average_last' must be at least 1");
  }
  if (const json* v = find(root, "clip_factor")) {
    config.clip_factor = as_double(*v, source_name, "clip_factor");
    if (!(config.clip_factor > 0.0) || !std::isfinite(config.clip_factor)) {
      fail(source_name, "'clip_factor' must be positive and finite");
    }
  }
  if (const json* v = find(root, "replicates")) {
    config.replicates = static_cast<int>(as_long(*v, source_name, "replicates"));
    if (config.replicates < 1) fail(source_name, "'replicates' must be at least 1");
  }
  if (const json* v = find(root, "seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer()) {
      fail(source_name, "'seed' must be a nonnegative integer");
    }
    if (v->is_number_integer() && v->get<long long>() < 0) {
      fail(source_name, "'seed' must be nonnegative");
    }
    config.seed = v->get<std::uint64_t>();
  }

  const json* output_dir = find(root, "output_dir");
  if (!output_dir) fail(source_name, "'output_dir' is required");
  config.output_dir = as_string(*output_dir, source_name, "output_dir");
  if (config.output_dir.empty()) fail(source_name, "'output_dir' must not be empty");

  if (const json* v = find(root, "record_stride")) {
    config.record_stride = as_long(*v, source_name, "record_stride");
    if (config.record_stride < 1)
      fail(source_name, "'record_stride' must be at least 1");
  }
  if (const json* v = find(root, "emit_timing")) {
    config.emit_timing = as_bool(*v, source_name, "emit_timing");
  }

  // Optional location pre-centering.
  if (const json* v = find(root, "precenter_location")) {
    config.precenter_location = as_bool(*v, source_name, "precenter_location");
  }
  if (const json* v = find(root, "precenter_coordinate")) {
    config.precenter_coordinate =
        static_cast<int>(as_long(*v, source_name, "precenter_coordinate"));
  }
  if (const json* v = find(root, "precenter_window")) {
    config.precenter_window = as_long(*v, source_name, "precenter_window");
    if (config.precenter_window < 1)
      fail(source_name, "'precenter_window' must be at least 1");
  }
  if (config.precenter_location) {
    if (config.precenter_coordinate < 0 ||
        config.precenter_coordinate >= static_cast<int>(domain.size())) {
      fail(source_name,
           "'precenter_coordinate' must name a parameter coordinate when "
           "'precenter_location' is set");
    }
    if (domain.coordinates[static_cast<std::size_t>(config.precenter_coordinate)]
            .kind != DomainKind::Unbounded) {
      fail(source_name,
           "'precenter_coordinate' must be an unbounded (location) coordinate");
    }
  }

  // Evaluation points and starting points, by mode.
  if (const json* v = find(root, "theta0")) {
    config.theta0 = as_double_array(*v, source_name, "theta0");
    check_theta(config.theta0, domain, source_name, "theta0");
  }
  if (const json* v = find(root, "theta_eval")) {
    if (!v->is_array() || v->empty()) {
      fail(source_name, "'theta_eval' must be a nonempty array of points");
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      std::ostringstream name;
      name << "theta_eval[" << i << "]";
      config.theta_eval.push_back(
          as_double_array((*v)[i], source_name, name.str()));
      check_theta(config.theta_eval.back(), domain, source_name, name.str());
    }
  }

  switch (config.mode) {
    case ExperimentMode::Batch:
    case ExperimentMode::Online:
      if (config.theta0.empty()) {
        fail(source_name, "'theta0' is required for batch and online modes");
      }
      break;
    case ExperimentMode::LikelihoodEval:
      if (config.theta_eval.empty()) {
        fail(source_name, "'theta_eval' is required for likelihood-eval mode");
      }
      break;
    case ExperimentMode::PitCheck:
    case ExperimentMode::GradientHistogram:
      if (config.theta_eval.empty()) {
        if (!config.theta0.empty()) {
          config.theta_eval.push_back(config.theta0);
        } else if (!config.theta_star.empty()) {
          config.theta_eval.push_back(config.theta_star);
        } else {
          fail(source_name,
               "provide 'theta_eval', 'theta0', or 'theta_star' as the "
               "evaluation point");
        }
      }
      break;
  }
  if (config.mode == ExperimentMode::GradientHistogram &&
      config.theta_eval.size() != 1) {
    fail(source_name, "gradient-histogram mode takes exactly one evaluation point");
  }

  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace abcmle
