#include "abcmle/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

#include "abcmle/harness/data.hpp"
#include "abcmle/harness/record_io.hpp"
#include "abcmle/iid/score.hpp"
#include "abcmle/mle/gradient_ascent.hpp"
#include "abcmle/observation.hpp"
#include "abcmle/smc/particle_filter.hpp"
#include "abcmle/streams.hpp"
#include "abcmle/version.hpp"

namespace abcmle {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

std::vector<double> column_mean(const std::vector<std::vector<double>>& rows) {
  std::vector<double> mean(rows.empty() ? 0 : rows.front().size(), 0.0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += row[k];
  }
  for (double& m : mean) m /= static_cast<double>(rows.size());
  return mean;
}

std::vector<double> column_variance(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& mean) {
  std::vector<double> variance(mean.size(), 0.0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double d = row[k] - mean[k];
      variance[k] += d * d;
    }
  }
  for (double& v : variance) v /= static_cast<double>(rows.size() - 1);
  return variance;
}

double scalar_mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double scalar_variance(const std::vector<double>& values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(values.size() - 1);
}

// Everything a single replicate needs: the (possibly preprocessed and
// centered) raw series and its smoothed version.
struct Prepared {
  std::vector<double> raw;
  double location_shift = 0.0;
  NoisySeries series;
};

struct DatasetCache {
  std::vector<double> values;
  bool ar1_used = false;
  Ar1Fit ar1;
  std::string note;
};

DatasetCache load_dataset(const ExperimentConfig& config) {
  DatasetCache cache;
  RawSeries series = ingest_csv(config.dataset);
  cache.note = series.note;
  cache.values = std::move(series.values);
  if (config.preprocess.log_returns) {
    cache.values = preprocess_log_returns(cache.values);
  }
  if (config.preprocess.ar1_residuals) {
    cache.ar1 = ar1_residuals(cache.values);
    cache.values = cache.ar1.residuals;
    cache.ar1_used = true;
  }
  return cache;
}

Prepared prepare_data(const ExperimentConfig& config, const Model& model,
                      std::uint64_t master, const DatasetCache* dataset) {
  Prepared prepared;
  if (dataset) {
    prepared.raw = dataset->values;
  } else {
    const ParameterVector truth(config.theta_star, model.domain());
    Rng rng = Rng::keyed(master, kStreamDataset);
    prepared.raw = model.simulate(truth, config.observation_count, rng);
  }
  if (config.precenter_location) {
    const std::size_t window = std::min(
        prepared.raw.size(), static_cast<std::size_t>(config.precenter_window));
    double mean = 0.0;
    for (std::size_t i = 0; i < window; ++i) mean += prepared.raw[i];
    mean /= static_cast<double>(window);
    for (double& v : prepared.raw) v -= mean;
    prepared.location_shift = mean;
  }
  const bool transformed =
      config.transform.value_or(model.uses_observation_transform());
  prepared.series =
      config.noisy
          ? corrupt_observations(prepared.raw, config.epsilon, transformed,
                                 derive_seed(master, kStreamNoise))
          : transform_only(prepared.raw, config.epsilon, transformed);
  return prepared;
}

AscentOptions make_ascent_options(const ExperimentConfig& config) {
  AscentOptions options;
  options.epsilon = config.epsilon;
  options.particle_count = config.particle_count;
  options.score_method = config.score_method;
  options.schedule = config.schedule;
  options.iterations = config.iterations;
  options.average_last = config.average_last;
  options.clip_factor = config.clip_factor;
  options.transform_observations = config.transform;
  options.record_timing = config.emit_timing;
  options.record_stride = config.record_stride;
  return options;
}

void shift_record_coordinate(RunRecord& record, int coordinate, double shift) {
  if (shift == 0.0) return;
  const std::size_t c = static_cast<std::size_t>(coordinate);
  record.initial_theta[c] += shift;
  record.final_theta[c] += shift;
  for (RunStep& step : record.steps) step.theta[c] += shift;
}

struct Runner {
  const ExperimentConfig& config;
  const Model& model;
  fs::path dir;
  std::vector<std::string> provenance;
  json summary;
  int failed = 0;

  Runner(const ExperimentConfig& config_in, const Model& model_in)
      : config(config_in), model(model_in) {
    dir = output_root() / config.output_dir;
    fs::create_directories(dir);
    provenance.push_back(std::string("version=") + kVersionString);
    provenance.push_back("config=" + config.config_hash);
    provenance.push_back("model=" + config.model);
    provenance.push_back("mode=" + mode_name(config.mode));
    summary["version"] = kVersionString;
    summary["config_hash"] = config.config_hash;
    summary["config_source"] = config.source_path;
    summary["mode"] = mode_name(config.mode);
    summary["model"] = config.model;
    summary["epsilon"] = config.epsilon;
    summary["particle_count"] = config.particle_count;
    summary["replicates"] = config.replicates;
    summary["noisy"] = config.noisy;
    summary["seed"] = config.seed;
    if (!config.theta_star.empty()) {
      summary["theta_star"] = config.theta_star;
      summary["observation_count"] = config.observation_count;
    } else {
      summary["dataset"] = config.dataset;
    }
  }

  void note_dataset(const DatasetCache& cache) {
    summary["dataset_observations"] = cache.values.size();
    if (cache.ar1_used) {
      summary["ar1_intercept"] = cache.ar1.intercept;
      summary["ar1_slope"] = cache.ar1.slope;
      provenance.push_back("ar1_intercept=" + format_double(cache.ar1.intercept));
      provenance.push_back("ar1_slope=" + format_double(cache.ar1.slope));
    }
  }

  void run_estimation(const DatasetCache* dataset) {
    json runs = json::array();
    std::vector<std::vector<double>> finals;
    for (int r = 1; r <= config.replicates; ++r) {
      const std::uint64_t master =
          derive_seed(config.seed, kStreamReplicate, static_cast<std::uint64_t>(r));
      json entry;
      entry["replicate"] = r;
      entry["seed"] = master;
      try {
        const Prepared data = prepare_data(config, model, master, dataset);
        std::vector<double> start = config.theta0;
        if (config.precenter_location) {
          start[static_cast<std::size_t>(config.precenter_coordinate)] -=
              data.location_shift;
        }
        const ParameterVector theta0(start, model.domain());
        const AscentOptions options = make_ascent_options(config);
        RunRecord record =
            config.mode == ExperimentMode::Batch
                ? batch_gradient_ascent(model, theta0, data.series.values,
                                        options, master)
                : online_gradient_ascent(model, theta0, data.series.values,
                                         options, master);
        if (config.precenter_location) {
          shift_record_coordinate(record, config.precenter_coordinate,
                                  data.location_shift);
          entry["location_shift"] = data.location_shift;
        }
        std::vector<std::string> lines = provenance;
        lines.push_back("replicate=" + std::to_string(r));
        lines.push_back("replicate_seed=" + std::to_string(master));
        if (config.precenter_location) {
          lines.push_back("location_shift=" + format_double(data.location_shift));
        }
        std::ostringstream name;
        name << "run_" << r << ".csv";
        write_run_record(dir / name.str(), record, model.domain().names(),
                         lines, config.emit_timing);
        entry["file"] = name.str();
        entry["completed"] = record.completed;
        entry["updates"] = record.updates;
        entry["clip_events"] = record.clip_events;
        entry["averaged"] = record.averaged;
        entry["final_theta"] = record.final_theta;
        if (!record.completed) {
          entry["abort_reason"] = record.abort_reason;
          ++failed;
        } else {
          finals.push_back(record.final_theta);
        }
      } catch (const Error& error) {
        entry["completed"] = false;
        entry["error"] = error.what();
        ++failed;
      }
      runs.push_back(std::move(entry));
    }
    summary["runs"] = std::move(runs);
    if (!finals.empty()) {
      const std::vector<double> mean = column_mean(finals);
      summary["final_theta_mean"] = mean;
      if (finals.size() >= 2) {
        summary["final_theta_variance"] = column_variance(finals, mean);
      }
    }
    summary["schedule"] = {{"a", config.schedule.a},
                           {"b", config.schedule.b},
                           {"t0", config.schedule.t0}};
    if (!config.schedule.multipliers.empty()) {
      summary["schedule"]["multipliers"] = config.schedule.multipliers;
    }
    summary["score_method"] = config.score_method == ScoreMethod::Marginal
                                  ? "marginal"
                                  : "path_space";
    summary["iterations"] = config.iterations;
    summary["average_last"] = config.average_last;
  }

  void run_likelihood_eval(const DatasetCache* dataset) {
    const std::uint64_t data_master =
        derive_seed(config.seed, kStreamReplicate, 1);
    const Prepared data = prepare_data(config, model, data_master, dataset);
    CsvTable table;
    table.comments = provenance;
    table.columns = {"point", "replicate", "log_likelihood"};
    json points = json::array();
    for (std::size_t p = 0; p < config.theta_eval.size(); ++p) {
      const ParameterVector theta(config.theta_eval[p], model.domain());
      json entry;
      entry["theta"] = config.theta_eval[p];
      std::vector<double> estimates;
      json errors = json::array();
      for (int r = 1; r <= config.replicates; ++r) {
        const std::uint64_t master = derive_seed(config.seed, kStreamReplicate,
                                                 static_cast<std::uint64_t>(r));
        try {
          const double value = estimate_log_likelihood(
              model, theta, data.series.values, config.epsilon,
              config.particle_count, derive_seed(master, kStreamFilter, 1),
              config.transform);
          table.rows.push_back(
              {static_cast<double>(p + 1), static_cast<double>(r), value});
          estimates.push_back(value);
        } catch (const Error& error) {
          json failure;
          failure["replicate"] = r;
          failure["error"] = error.what();
          errors.push_back(std::move(failure));
          ++failed;
        }
      }
      if (!estimates.empty()) {
        entry["log_likelihoods"] = estimates;
        const double mean = scalar_mean(estimates);
        entry["mean"] = mean;
        if (estimates.size() >= 2) {
          entry["variance"] = scalar_variance(estimates, mean);
        }
      }
      if (!errors.empty()) entry["errors"] = std::move(errors);
      points.push_back(std::move(entry));
    }
    write_csv(dir / "likelihood.csv", table);
    summary["points"] = std::move(points);
  }

  void run_pit(const DatasetCache* dataset) {
    const std::uint64_t data_master =
        derive_seed(config.seed, kStreamReplicate, 1);
    const Prepared data = prepare_data(config, model, data_master, dataset);
    json points = json::array();
    for (std::size_t p = 0; p < config.theta_eval.size(); ++p) {
      json entry;
      entry["theta"] = config.theta_eval[p];
      try {
        const ParameterVector theta(config.theta_eval[p], model.domain());
        const PitResult pit = pit_model_check(
            model, theta, data.series.values, config.epsilon,
            config.particle_count,
            derive_seed(data_master, kStreamFilter,
                        static_cast<std::uint64_t>(p + 1)),
            config.transform);
        const std::size_t n = pit.sorted_values.size();
        CsvTable table;
        table.comments = provenance;
        {
          std::string text = "theta=";
          for (std::size_t k = 0; k < config.theta_eval[p].size(); ++k) {
            if (k) text += ",";
            text += format_double(config.theta_eval[p][k]);
          }
          table.comments.push_back(text);
        }
        table.comments.push_back("ks_statistic=" +
                                 format_double(pit.ks_statistic));
        table.columns = {"uniform_quantile", "pit_value"};
        for (std::size_t i = 0; i < n; ++i) {
          table.rows.push_back(
              {static_cast<double>(i + 1) / static_cast<double>(n + 1),
               pit.sorted_values[i]});
        }
        std::ostringstream name;
        name << "pit_" << (p + 1) << ".csv";
        write_csv(dir / name.str(), table);
        entry["file"] = name.str();
        entry["observations"] = n;
        entry["ks_statistic"] = pit.ks_statistic;
        entry["ks_critical_1pct"] =
            1.63 / std::sqrt(static_cast<double>(n));
      } catch (const Error& error) {
        entry["error"] = error.what();
        ++failed;
      }
      points.push_back(std::move(entry));
    }
    summary["points"] = std::move(points);
  }

  void run_histogram(const DatasetCache* dataset) {
    json runs = json::array();
    const ParameterVector theta(config.theta_eval.front(), model.domain());
    for (int r = 1; r <= config.replicates; ++r) {
      const std::uint64_t master =
          derive_seed(config.seed, kStreamReplicate, static_cast<std::uint64_t>(r));
      json entry;
      entry["replicate"] = r;
      entry["seed"] = master;
      try {
        // The histogram pipeline corrupts internally; it needs the raw
        // series, not the smoothed one.
        std::vector<double> raw;
        if (dataset) {
          raw = dataset->values;
        } else {
          const ParameterVector truth(config.theta_star, model.domain());
          Rng rng = Rng::keyed(master, kStreamDataset);
          raw = model.simulate(truth, config.observation_count, rng);
        }
        IidScoreOptions options;
        options.epsilon = config.epsilon;
        options.sample_count = config.particle_count;
        options.coordinates = GradientCoordinates::Natural;
        options.transform_observations = config.transform;
        const std::vector<GradientVector> scores =
            gradient_histogram(model, theta, raw, options, master);

        CsvTable table;
        table.comments = provenance;
        table.columns = {"observation"};
        for (const std::string& name : model.domain().names()) {
          table.columns.push_back("score_" + name);
        }
        for (std::size_t t = 0; t < scores.size(); ++t) {
          std::vector<double> row;
          row.reserve(1 + scores[t].size());
          row.push_back(static_cast<double>(t + 1));
          for (double v : scores[t].values) row.push_back(v);
          table.rows.push_back(std::move(row));
        }
        std::ostringstream name;
        name << "scores_" << r << ".csv";
        write_csv(dir / name.str(), table);
        entry["file"] = name.str();
        entry["observations"] = scores.size();

        // Column moments over the full sample and its first half: the
        // heavy-tail diagnostics compare exactly these.
        std::vector<std::vector<double>> rows;
        rows.reserve(scores.size());
        for (const GradientVector& g : scores) rows.push_back(g.values);
        const std::vector<double> mean = column_mean(rows);
        entry["score_mean"] = mean;
        if (rows.size() >= 2) {
          entry["score_variance"] = column_variance(rows, mean);
          const std::size_t half = rows.size() / 2;
          if (half >= 2) {
            std::vector<std::vector<double>> head(rows.begin(),
                                                  rows.begin() + half);
            const std::vector<double> head_mean = column_mean(head);
            entry["score_variance_first_half"] =
                column_variance(head, head_mean);
          }
        }
        entry["completed"] = true;
      } catch (const Error& error) {
        entry["completed"] = false;
        entry["error"] = error.what();
        ++failed;
      }
      runs.push_back(std::move(entry));
    }
    summary["runs"] = std::move(runs);
    summary["theta"] = config.theta_eval.front();
  }
};

}  // namespace

PitResult pit_model_check(const Model& model, const ParameterVector& theta,
                          std::span<const double> values, double epsilon,
                          int particle_count, std::uint64_t seed,
                          std::optional<bool> transform_observations) {
  FilterOptions options;
  options.epsilon = epsilon;
  options.particle_count = particle_count;
  options.compute_score = false;
  options.transform_observations = transform_observations;
  const FilterRunResult run = run_filter(model, theta, values, options, seed);

  PitResult result;
  result.sorted_values = run.conditional_cdfs;
  std::sort(result.sorted_values.begin(), result.sorted_values.end());
  const std::size_t n = result.sorted_values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double value = result.sorted_values[i];
    const double upper = static_cast<double>(i + 1) / static_cast<double>(n) - value;
    const double lower = value - static_cast<double>(i) / static_cast<double>(n);
    result.ks_statistic = std::max({result.ks_statistic, upper, lower});
  }
  return result;
}

std::filesystem::path output_root() {
  if (const char* root = std::getenv("ABCMLE_OUTPUT_ROOT")) {
    if (root[0] != '\0') return fs::path(root);
  }
  return fs::current_path();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::unique_ptr<Model> model =
      make_model(config.model, config.model_options);

  Runner runner(config, *model);

  DatasetCache cache;
  const DatasetCache* dataset = nullptr;
  if (!config.dataset.empty()) {
    cache = load_dataset(config);
    runner.note_dataset(cache);
    dataset = &cache;
  }

  switch (config.mode) {
    case ExperimentMode::Batch:
    case ExperimentMode::Online:
      runner.run_estimation(dataset);
      break;
    case ExperimentMode::LikelihoodEval:
      runner.run_likelihood_eval(dataset);
      break;
    case ExperimentMode::PitCheck:
      runner.run_pit(dataset);
      break;
    case ExperimentMode::GradientHistogram:
      runner.run_histogram(dataset);
      break;
  }

  runner.summary["failed"] = runner.failed;

  ExperimentResult result;
  result.output_dir = runner.dir;
  result.summary_path = runner.dir / "summary.json";
  result.replicates = config.replicates;
  result.failed = runner.failed;

  std::ofstream out(result.summary_path);
  if (!out) {
    throw ConfigError("cannot open '" + result.summary_path.string() +
                      "' for writing");
  }
  out << runner.summary.dump(2) << "\n";
  if (!out) {
    throw ConfigError("failed while writing '" + result.summary_path.string() +
                      "'");
  }
  return result;
}

}  // namespace abcmle
