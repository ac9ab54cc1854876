// Command line front end: runs configured experiments, validates model
// gradients against finite differences, produces conditional-CDF uniformity
// diagnostics, and draws raw samples from the built-in models.
//
// Exit codes: 0 success, 2 configuration or parameter-domain error,
// 3 numerical failure (or any replicate that did not complete).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "abcmle/errors.hpp"
#include "abcmle/gradient_check.hpp"
#include "abcmle/harness/config.hpp"
#include "abcmle/harness/experiment.hpp"
#include "abcmle/harness/record_io.hpp"
#include "abcmle/models/registry.hpp"
#include "abcmle/version.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw abcmle::ConfigError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& error) {
    throw abcmle::ConfigError("config " + path + ": " +
                              std::string(error.what()));
  }
}

// Settings for the gradient validation subcommand. Accepts either a minimal
// document ({"model": ..., optional model_options/points/tolerance/delta/
// seed/comment}) or any full experiment config, from which the model and
// seed are taken.
struct GradientCheckConfig {
  std::string model;
  abcmle::ModelOptions model_options;
  long points = 1000;
  double tolerance = 1e-5;
  double delta = 1e-6;
  std::uint64_t seed = 1;
};

GradientCheckConfig parse_gradient_check_config(const std::string& path) {
  const json root = parse_json_file(path);
  if (!root.is_object()) {
    throw abcmle::ConfigError("config " + path +
                              ": top level must be a JSON object");
  }

  GradientCheckConfig config;
  if (root.contains("mode")) {
    const abcmle::ExperimentConfig experiment =
        abcmle::parse_config(root.dump(), path);
    config.model = experiment.model;
    config.model_options = experiment.model_options;
    config.seed = experiment.seed;
    return config;
  }

  static const std::vector<std::string> allowed = {
      "model", "model_options", "points", "tolerance",
      "delta", "seed",          "comment"};
  for (const auto& item : root.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) ==
        allowed.end()) {
      throw abcmle::ConfigError("config " + path + ": unknown key '" +
                                item.key() + "'");
    }
  }
  if (!root.contains("model") || !root["model"].is_string()) {
    throw abcmle::ConfigError("config " + path +
                              ": 'model' (string) is required");
  }
  config.model = root["model"].get<std::string>();
  if (root.contains("model_options")) {
    const json& options = root["model_options"];
    if (!options.is_object()) {
      throw abcmle::ConfigError("config " + path +
                                ": 'model_options' must be an object");
    }
    static const std::vector<std::string> option_keys = {
        "stable_exclusion_radius", "gk_c", "svar_with_drift"};
    for (const auto& item : options.items()) {
      if (std::find(option_keys.begin(), option_keys.end(), item.key()) ==
          option_keys.end()) {
        throw abcmle::ConfigError("config " + path +
                                  ": unknown key 'model_options." +
                                  item.key() + "'");
      }
    }
    if (options.contains("stable_exclusion_radius")) {
      config.model_options.stable_exclusion_radius =
          options["stable_exclusion_radius"].get<double>();
    }
    if (options.contains("gk_c")) {
      config.model_options.gk_c = options["gk_c"].get<double>();
    }
    if (options.contains("svar_with_drift")) {
      config.model_options.svar_with_drift =
          options["svar_with_drift"].get<bool>();
    }
  }
  if (root.contains("points")) {
    config.points = root["points"].get<long>();
    if (config.points < 1) {
      throw abcmle::ConfigError("config " + path +
                                ": 'points' must be at least 1");
    }
  }
  if (root.contains("tolerance")) {
    config.tolerance = root["tolerance"].get<double>();
    if (!(config.tolerance > 0.0)) {
      throw abcmle::ConfigError("config " + path +
                                ": 'tolerance' must be positive");
    }
  }
  if (root.contains("delta")) {
    config.delta = root["delta"].get<double>();
    if (!(config.delta > 0.0)) {
      throw abcmle::ConfigError("config " + path +
                                ": 'delta' must be positive");
    }
  }
  if (root.contains("seed")) {
    config.seed = root["seed"].get<std::uint64_t>();
  }
  return config;
}

int run_command(const std::string& config_path) {
  const abcmle::ExperimentConfig config = abcmle::load_config(config_path);
  const abcmle::ExperimentResult result = abcmle::run_experiment(config);
  std::cout << "wrote " << result.summary_path.string() << "\n";
  if (result.failed > 0) {
    std::cout << result.failed << " run(s) failed; see the summary for details"
              << "\n";
    return 3;
  }
  return 0;
}

int check_gradients_command(const std::string& config_path) {
  const GradientCheckConfig config = parse_gradient_check_config(config_path);
  const std::unique_ptr<abcmle::Model> model =
      abcmle::make_model(config.model, config.model_options);
  const abcmle::GradientCheckReport report = abcmle::check_model_gradients(
      *model, config.points, config.tolerance, config.seed, config.delta);
  std::cout << "model " << config.model << ": " << report.points
            << " random points, relative tolerance "
            << abcmle::format_double(report.tolerance) << "\n";
  for (const abcmle::GradientCheckEntry& entry : report.entries) {
    std::cout << "  " << entry.function << ": max error "
              << abcmle::format_double(entry.max_error) << " over "
              << entry.checks << " checks, " << entry.failures
              << " failure(s)\n";
  }
  if (report.passed()) {
    std::cout << "all gradients match finite differences\n";
    return 0;
  }
  std::cout << report.failures() << " gradient check(s) failed\n";
  return 3;
}

int pit_command(const std::string& config_path) {
  json root = parse_json_file(config_path);
  if (!root.is_object()) {
    throw abcmle::ConfigError("config " + config_path +
                              ": top level must be a JSON object");
  }
  root["mode"] = "pit-check";
  const abcmle::ExperimentConfig config =
      abcmle::parse_config(root.dump(), config_path);
  const abcmle::ExperimentResult result = abcmle::run_experiment(config);

  const json summary = parse_json_file(result.summary_path.string());
  if (summary.contains("points")) {
    for (const json& point : summary["points"]) {
      if (point.contains("ks_statistic")) {
        std::cout << "ks=" << point["ks_statistic"].get<double>()
                  << " critical_1pct="
                  << point["ks_critical_1pct"].get<double>() << " ("
                  << point["observations"].get<long>() << " observations)\n";
      } else if (point.contains("error")) {
        std::cout << "failed: " << point["error"].get<std::string>() << "\n";
      }
    }
  }
  std::cout << "wrote " << result.summary_path.string() << "\n";
  return result.failed > 0 ? 3 : 0;
}

int simulate_command(const std::string& model_name,
                     const std::vector<std::string>& rest) {
  const std::unique_ptr<abcmle::Model> model = abcmle::make_model(model_name);
  const std::size_t dim = model->domain().size();
  if (rest.size() != dim + 2) {
    std::ostringstream message;
    message << "simulate " << model_name << " expects " << dim
            << " parameter value(s)";
    for (const std::string& name : model->domain().names()) {
      message << " <" << name << ">";
    }
    message << " followed by <n> <seed>; got " << rest.size()
            << " argument(s)";
    throw abcmle::ConfigError(message.str());
  }
  std::vector<double> values(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    values[k] = abcmle::parse_double(rest[k]);
  }
  long n = 0;
  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    n = std::stol(rest[dim], &used);
    if (used != rest[dim].size()) throw std::invalid_argument(rest[dim]);
  } catch (const std::exception&) {
    throw abcmle::ConfigError("sample count '" + rest[dim] +
                              "' is not an integer");
  }
  if (n < 1) {
    throw abcmle::ConfigError("sample count must be at least 1");
  }
  try {
    std::size_t used = 0;
    seed = std::stoull(rest[dim + 1], &used);
    if (used != rest[dim + 1].size()) {
      throw std::invalid_argument(rest[dim + 1]);
    }
  } catch (const std::exception&) {
    throw abcmle::ConfigError("seed '" + rest[dim + 1] +
                              "' is not an unsigned integer");
  }

  const abcmle::ParameterVector theta(values, model->domain());
  abcmle::Rng rng(seed);
  const std::vector<double> draws = model->simulate(theta, n, rng);
  for (double value : draws) {
    std::cout << abcmle::format_double(value) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-free maximum-likelihood estimation for state-space "
               "models with simulable observations"};
  app.set_version_flag("--version", std::string(abcmle::kVersionString));
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand(
      "run", "Execute the experiment described by a JSON config");
  run->add_option("config", run_config, "Path to the experiment config")
      ->required();

  std::string gradient_config;
  CLI::App* check = app.add_subcommand(
      "check-gradients",
      "Validate a model's analytic gradients against finite differences");
  check->add_option("config", gradient_config, "Path to the check config")
      ->required();

  std::string pit_config;
  CLI::App* pit = app.add_subcommand(
      "pit", "Run the conditional-CDF uniformity diagnostic for a config");
  pit->add_option("config", pit_config, "Path to the experiment config")
      ->required();

  std::string simulate_model;
  std::vector<std::string> simulate_rest;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Print raw draws: simulate <model> <theta...> <n> <seed>");
  simulate->add_option("model", simulate_model, "Registered model name")
      ->required();
  simulate
      ->add_option("args", simulate_rest,
                   "Parameter values, then the sample count and the seed")
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_config);
    if (check->parsed()) return check_gradients_command(gradient_config);
    if (pit->parsed()) return pit_command(pit_config);
    if (simulate->parsed()) {
      return simulate_command(simulate_model, simulate_rest);
    }
  } catch (const abcmle::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const abcmle::DomainError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const abcmle::Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
  return 0;
}
