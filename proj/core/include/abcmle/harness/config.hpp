#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "abcmle/mle/schedule.hpp"
#include "abcmle/models/registry.hpp"
#include "abcmle/smc/particle_filter.hpp"

namespace abcmle {

enum class ExperimentMode {
  Batch,              // full-data gradient ascent, one score per iteration
  Online,             // one update per observation
  LikelihoodEval,     // repeated likelihood estimates at fixed points
  PitCheck,           // conditional-CDF uniformity diagnostics
  GradientHistogram,  // per-observation score estimates at a fixed point
};

std::string mode_name(ExperimentMode mode);

struct PreprocessOptions {
  bool log_returns = false;
  bool ar1_residuals = false;
};

// A fully validated experiment description. The JSON schema is documented in
// docs/config-schema.md; parse_config rejects unknown keys so typos fail
// loudly instead of silently running defaults.
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Batch;
  std::string model;
  ModelOptions model_options;

  // Exactly one of: synthetic truth (with observation_count) or a dataset.
  std::vector<double> theta_star;
  std::string dataset;
  PreprocessOptions preprocess;

  std::vector<double> theta0;                  // batch/online start
  std::vector<std::vector<double>> theta_eval; // evaluation points

  double epsilon = 0.1;
  int particle_count = 1000;
  long observation_count = 0;
  bool noisy = true;
  std::optional<bool> transform;  // unset = model default
  ScoreMethod score_method = ScoreMethod::PathSpace;
  StepSchedule schedule;
  long iterations = 1000;
  long average_last = 1000;
  double clip_factor = 10.0;
  int replicates = 1;
  std::uint64_t seed = 1;
  std::string output_dir;
  long record_stride = 1;
  bool emit_timing = false;

  // Subtract the mean of the first precenter_window raw observations from
  // the data (and the matching location coordinate of theta0) before
  // estimating; the shift is added back to all reported estimates.
  bool precenter_location = false;
  int precenter_coordinate = -1;
  long precenter_window = 100;

  std::string config_hash;   // 16 hex digits over the canonical JSON
  std::string source_path;   // where the config was loaded from
};

ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& source_name);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace abcmle
