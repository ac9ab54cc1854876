#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "abcmle/harness/config.hpp"
#include "abcmle/model.hpp"
#include "abcmle/parameters.hpp"

namespace abcmle {

// Conditional-CDF uniformity check: one filtering pass collecting the
// predictive CDF value of every observation, returned sorted together with
// the Kolmogorov-Smirnov statistic against Uniform[0,1]. Under the
// data-generating model and parameters these values are i.i.d. uniform.
struct PitResult {
  std::vector<double> sorted_values;
  double ks_statistic = 0.0;
};

PitResult pit_model_check(const Model& model, const ParameterVector& theta,
                          std::span<const double> values, double epsilon,
                          int particle_count, std::uint64_t seed,
                          std::optional<bool> transform_observations = {});

// Root directory for experiment outputs: $ABCMLE_OUTPUT_ROOT when set,
// otherwise the current working directory. Config output_dir paths are
// resolved against this.
std::filesystem::path output_root();

struct ExperimentResult {
  std::filesystem::path output_dir;
  std::filesystem::path summary_path;
  int replicates = 0;
  int failed = 0;  // replicates or evaluations that did not complete
};

// Executes the configured experiment: per-replicate trace CSVs plus one
// summary JSON, all stamped with the library version and the config hash.
// A failure inside one replicate is recorded and the remaining replicates
// still run; the failure count is reported in the result and the summary.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace abcmle
