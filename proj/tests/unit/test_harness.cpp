// Harness layer: lossless numeric serialization, CSV and run-trace round
// trips, config validation, data ingestion and preprocessing, and an
// end-to-end experiment smoke check with determinism and summary
// cross-validation.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"

#include "abcmle/errors.hpp"
#include "abcmle/harness/config.hpp"
#include "abcmle/harness/data.hpp"
#include "abcmle/harness/experiment.hpp"
#include "abcmle/harness/record_io.hpp"
#include "abcmle/models/registry.hpp"
#include "abcmle/observation.hpp"
#include "abcmle/rng.hpp"
#include "support/helpers.hpp"

using namespace abcmle;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / name;
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Error message produced when parsing the given config, empty if it parsed.
std::string rejection(const json& config) {
  try {
    parse_config(config.dump(), "<test>");
  } catch (const ConfigError& error) {
    return error.what();
  }
  return "";
}

bool rejected_with(const json& config, const std::string& needle) {
  const std::string message = rejection(config);
  INFO("message: ", message);
  return message.find(needle) != std::string::npos;
}

json base_config() {
  return json{{"mode", "batch"},
              {"model", "gaussian_surrogate"},
              {"theta_star", {0.8, 0.5, 0.5}},
              {"observation_count", 50},
              {"epsilon", 0.1},
              {"particle_count", 100},
              {"theta0", {0.5, 1.0, 1.0}},
              {"output_dir", "out"},
              {"seed", 7}};
}

}  // namespace

TEST_CASE("numeric formatting round-trips every double losslessly") {
  Rng rng(6021);
  for (int i = 0; i < 2000; ++i) {
    // Spread mantissas over a wide range of magnitudes.
    const double magnitude = std::pow(10.0, rng.uniform(-300.0, 300.0));
    const double value = (rng.uniform() - 0.5) * magnitude;
    const double back = parse_double(format_double(value));
    CHECK(back == value);
  }
  CHECK(parse_double(format_double(0.25)) == 0.25);
  CHECK(parse_double(format_double(5e-324)) == 5e-324);  // smallest denormal
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  const double neg_zero = parse_double(format_double(-0.0));
  CHECK(neg_zero == 0.0);
  CHECK(std::signbit(neg_zero));

  CHECK(std::isnan(parse_double(format_double(
      std::numeric_limits<double>::quiet_NaN()))));
  CHECK(parse_double(format_double(std::numeric_limits<double>::infinity())) ==
        std::numeric_limits<double>::infinity());
  CHECK(parse_double(format_double(-std::numeric_limits<double>::infinity())) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("number parsing is strict about trailing and leading junk") {
  CHECK_THROWS_AS(parse_double(""), ConfigError);
  CHECK_THROWS_AS(parse_double("abc"), ConfigError);
  CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
  CHECK_THROWS_AS(parse_double(" 1"), ConfigError);
  CHECK_THROWS_AS(parse_double("1 "), ConfigError);
  CHECK(parse_double("-1.25e-3") == -1.25e-3);
}

TEST_CASE("csv tables survive a write/read round trip exactly") {
  TempDir tmp("abcmle_csv_roundtrip");
  CsvTable table;
  table.comments = {"version=test", "free-form comment, with = and commas"};
  table.columns = {"a", "b", "c"};
  table.rows = {{1.0 / 3.0, -0.0, 5e-324},
                {6.02214076e23, std::sqrt(2.0), -1.2345678901234567e-89},
                {0.0, -7.5, 3.14159}};
  const fs::path path = tmp.path / "table.csv";
  write_csv(path, table);
  const CsvTable back = read_csv(path);
  CHECK(back.comments == table.comments);
  CHECK(back.columns == table.columns);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    REQUIRE(back.rows[r].size() == table.rows[r].size());
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      CHECK(back.rows[r][c] == table.rows[r][c]);
    }
  }

  SUBCASE("header-only tables are valid") {
    CsvTable empty;
    empty.columns = {"x"};
    write_csv(tmp.path / "empty.csv", empty);
    const CsvTable round = read_csv(tmp.path / "empty.csv");
    CHECK(round.columns == empty.columns);
    CHECK(round.rows.empty());
  }

  SUBCASE("malformed cells are reported with their line number") {
    write_text(tmp.path / "bad.csv", "x\n1.0\noops\n");
    try {
      read_csv(tmp.path / "bad.csv");
      FAIL("expected a parse error");
    } catch (const ConfigError& error) {
      CHECK(std::string(error.what()).find("line 3") != std::string::npos);
    }
  }

  SUBCASE("field-count mismatches are rejected") {
    write_text(tmp.path / "ragged.csv", "x,y\n1.0,2.0\n3.0\n");
    CHECK_THROWS_AS(read_csv(tmp.path / "ragged.csv"), ConfigError);
  }

  SUBCASE("a file without a header row is rejected") {
    write_text(tmp.path / "none.csv", "# only a comment\n");
    CHECK_THROWS_AS(read_csv(tmp.path / "none.csv"), ConfigError);
  }
}

TEST_CASE("run traces round-trip the full record") {
  TempDir tmp("abcmle_record_roundtrip");
  RunRecord record;
  record.initial_theta = {0.5, 1.0, 1.0};
  record.final_theta = {1.0 / 3.0, 0.7071067811865476, 2.5};
  record.averaged = 2;
  record.updates = 3;
  record.clip_events = 1;
  for (long j = 1; j <= 3; ++j) {
    RunStep step;
    step.index = j;
    step.theta = {0.5 + 0.01 * j, 1.0 - 0.001 * j, 1.0 + 1.0 / (3.0 * j)};
    step.gradient = {-1.5 * j, 0.25, 1e-8 * j};
    step.log_likelihood = -12.345 - j;
    step.ess = 64.0 - j;
    step.clipped = (j == 2);
    step.seconds = 0.001 * j;
    record.steps.push_back(std::move(step));
  }

  const std::vector<std::string> names = {"phi", "sigma_x2", "sigma_y"};
  const std::vector<std::string> provenance = {"version=test", "replicate=1"};

  for (bool timing : {true, false}) {
    if (!timing) {
      for (RunStep& step : record.steps) step.seconds = 0.0;
    }
    const fs::path path = tmp.path / (timing ? "t.csv" : "nt.csv");
    write_run_record(path, record, names, provenance, timing);
    const RunRecord back = read_run_record(path);
    CHECK(back.initial_theta == record.initial_theta);
    CHECK(back.final_theta == record.final_theta);
    CHECK(back.averaged == record.averaged);
    CHECK(back.updates == record.updates);
    CHECK(back.clip_events == record.clip_events);
    CHECK(back.completed == record.completed);
    CHECK(back.abort_reason == record.abort_reason);
    REQUIRE(back.steps.size() == record.steps.size());
    for (std::size_t s = 0; s < record.steps.size(); ++s) {
      CHECK(back.steps[s].index == record.steps[s].index);
      CHECK(back.steps[s].theta == record.steps[s].theta);
      CHECK(back.steps[s].gradient == record.steps[s].gradient);
      CHECK(back.steps[s].log_likelihood == record.steps[s].log_likelihood);
      CHECK(back.steps[s].ess == record.steps[s].ess);
      CHECK(back.steps[s].clipped == record.steps[s].clipped);
      CHECK(back.steps[s].seconds == record.steps[s].seconds);
    }
  }

  SUBCASE("aborted records keep their reason, including '=' in the text") {
    RunRecord aborted;
    aborted.initial_theta = {0.0};
    aborted.final_theta = {0.0};
    aborted.completed = false;
    aborted.abort_reason = "weights collapsed at step 3 (epsilon=1e-300)";
    RunStep step;
    step.index = 1;
    step.theta = {0.0};
    step.gradient = {std::numeric_limits<double>::quiet_NaN()};
    step.log_likelihood = -1.0;
    step.ess = std::numeric_limits<double>::quiet_NaN();
    aborted.steps.push_back(step);
    const fs::path path = tmp.path / "aborted.csv";
    write_run_record(path, aborted, {"shift"}, {}, false);
    const RunRecord back = read_run_record(path);
    CHECK(!back.completed);
    CHECK(back.abort_reason == aborted.abort_reason);
    REQUIRE(back.steps.size() == 1);
    CHECK(std::isnan(back.steps[0].gradient[0]));
    CHECK(std::isnan(back.steps[0].ess));
  }
}

TEST_CASE("config parsing accepts the reference document") {
  const ExperimentConfig config = parse_config(base_config().dump(), "<test>");
  CHECK(config.mode == ExperimentMode::Batch);
  CHECK(mode_name(config.mode) == "batch");
  CHECK(config.model == "gaussian_surrogate");
  CHECK(config.theta_star == std::vector<double>{0.8, 0.5, 0.5});
  CHECK(config.observation_count == 50);
  CHECK(config.epsilon == 0.1);
  CHECK(config.particle_count == 100);
  CHECK(config.noisy);                 // default
  CHECK(!config.transform.has_value());  // default: model decides
  CHECK(config.score_method == ScoreMethod::PathSpace);
  CHECK(config.replicates == 1);
  CHECK(config.seed == 7);
  CHECK(config.output_dir == "out");
  CHECK(config.source_path == "<test>");
  CHECK(config.config_hash.size() == 16);
  for (char c : config.config_hash) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }

  json with_comment = base_config();
  with_comment["comment"] = "free-text notes are allowed";
  CHECK(rejection(with_comment).empty());
}

TEST_CASE("config parsing rejects unknown keys everywhere") {
  json top = base_config();
  top["particel_count"] = 10;  // typo must fail loudly
  CHECK(rejected_with(top, "unknown key 'particel_count'"));

  json nested = base_config();
  nested["model_options"] = {{"gk_sea", 0.8}};
  CHECK(rejected_with(nested, "unknown key 'gk_sea'"));

  json sched = base_config();
  sched["schedule"] = {{"alpha", 0.1}};
  CHECK(rejected_with(sched, "unknown key 'alpha'"));

  json prep = base_config();
  prep["preprocess"] = {{"logreturns", true}};
  CHECK(rejected_with(prep, "unknown key 'logreturns'"));
}

TEST_CASE("config parsing enforces required keys and ranges") {
  for (const char* key : {"mode", "model", "epsilon", "particle_count",
                          "output_dir"}) {
    json broken = base_config();
    broken.erase(key);
    CHECK(rejected_with(broken, key));
  }

  json both = base_config();
  both["dataset"] = "prices.csv";
  CHECK(rejected_with(both, "exactly one of"));

  json neither = base_config();
  neither.erase("theta_star");
  CHECK(rejected_with(neither, "exactly one of"));

  json no_count = base_config();
  no_count.erase("observation_count");
  CHECK(rejected_with(no_count, "observation_count"));

  json bad_mode = base_config();
  bad_mode["mode"] = "offline";
  CHECK(rejected_with(bad_mode, "likelihood-eval"));  // lists the valid modes

  json bad_model = base_config();
  bad_model["model"] = "cauchy";
  CHECK(rejected_with(bad_model, "alpha_stable"));  // lists registered models

  json bad_eps = base_config();
  bad_eps["epsilon"] = 0.0;
  CHECK(rejected_with(bad_eps, "epsilon"));

  json bad_particles = base_config();
  bad_particles["particle_count"] = 1;
  CHECK(rejected_with(bad_particles, "at least 2"));

  json bad_replicates = base_config();
  bad_replicates["replicates"] = 0;
  CHECK(rejected_with(bad_replicates, "replicates"));

  json bad_seed = base_config();
  bad_seed["seed"] = -1;
  CHECK(rejected_with(bad_seed, "nonnegative"));

  json bad_theta = base_config();
  bad_theta["theta0"] = {1.5, 1.0, 1.0};  // phi outside (-1, 1)
  CHECK(rejected_with(bad_theta, "theta0"));

  json short_theta = base_config();
  short_theta["theta_star"] = {0.8, 0.5};
  CHECK(rejected_with(short_theta, "expects 3"));

  json bad_schedule = base_config();
  bad_schedule["schedule"] = {{"b", 0.5}};  // boundary excluded
  CHECK(!rejection(bad_schedule).empty());

  json bad_multipliers = base_config();
  bad_multipliers["schedule"] = {{"multipliers", {1.0, 2.0}}};
  CHECK(!rejection(bad_multipliers).empty());

  json prep_synthetic = base_config();
  prep_synthetic["preprocess"] = {{"log_returns", true}};
  CHECK(rejected_with(prep_synthetic, "dataset"));
}

TEST_CASE("config transform switch maps onto the optional") {
  json on = base_config();
  on["transform"] = "on";
  CHECK(parse_config(on.dump(), "<test>").transform == true);
  json off = base_config();
  off["transform"] = "off";
  CHECK(parse_config(off.dump(), "<test>").transform == false);
  json model_default = base_config();
  model_default["transform"] = "model";
  CHECK(!parse_config(model_default.dump(), "<test>").transform.has_value());
  json bad = base_config();
  bad["transform"] = "maybe";
  CHECK(rejected_with(bad, "transform"));
}

TEST_CASE("config mode-specific requirements") {
  json eval = base_config();
  eval["mode"] = "likelihood-eval";
  eval.erase("theta0");
  CHECK(rejected_with(eval, "theta_eval"));
  eval["theta_eval"] = {{0.8, 0.5, 0.5}, {0.0, 1.0, 1.0}};
  const ExperimentConfig parsed = parse_config(eval.dump(), "<test>");
  CHECK(parsed.theta_eval.size() == 2);

  // pit-check falls back to theta0, then theta_star, as evaluation point.
  json pit = base_config();
  pit["mode"] = "pit-check";
  ExperimentConfig pit_config = parse_config(pit.dump(), "<test>");
  REQUIRE(pit_config.theta_eval.size() == 1);
  CHECK(pit_config.theta_eval[0] == std::vector<double>{0.5, 1.0, 1.0});
  pit.erase("theta0");
  pit_config = parse_config(pit.dump(), "<test>");
  REQUIRE(pit_config.theta_eval.size() == 1);
  CHECK(pit_config.theta_eval[0] == std::vector<double>{0.8, 0.5, 0.5});

  json histogram = base_config();
  histogram["mode"] = "gradient-histogram";
  histogram["theta_eval"] = {{0.8, 0.5, 0.5}, {0.0, 1.0, 1.0}};
  CHECK(rejected_with(histogram, "exactly one evaluation point"));

  json online = base_config();
  online["mode"] = "online";
  online.erase("theta0");
  CHECK(rejected_with(online, "theta0"));
}

TEST_CASE("config precenter options are validated against the domain") {
  json no_coord = base_config();
  no_coord["precenter_location"] = true;
  CHECK(rejected_with(no_coord, "precenter_coordinate"));

  json bounded = base_config();
  bounded["precenter_location"] = true;
  bounded["precenter_coordinate"] = 0;  // autoregression coefficient
  CHECK(rejected_with(bounded, "unbounded"));

  json ok = {{"mode", "batch"},
             {"model", "g_and_k"},
             {"theta_star", {2.0, 0.5, 10.0, 2.0}},
             {"observation_count", 50},
             {"epsilon", 0.1},
             {"particle_count", 100},
             {"theta0", {1.0, 1.0, 8.0, 1.0}},
             {"output_dir", "out"},
             {"precenter_location", true},
             {"precenter_coordinate", 2},
             {"precenter_window", 10}};
  const ExperimentConfig parsed = parse_config(ok.dump(), "<test>");
  CHECK(parsed.precenter_location);
  CHECK(parsed.precenter_coordinate == 2);
  CHECK(parsed.precenter_window == 10);
}

TEST_CASE("config hash depends on content, not formatting") {
  const json base = base_config();
  const std::string compact = base.dump();
  const std::string pretty = base.dump(4);
  const std::string hash1 = parse_config(compact, "a").config_hash;
  const std::string hash2 = parse_config(pretty, "b").config_hash;
  CHECK(hash1 == hash2);

  json changed = base_config();
  changed["seed"] = 8;
  CHECK(parse_config(changed.dump(), "c").config_hash != hash1);
}

TEST_CASE("data ingestion handles headers, multi-field rows, and errors") {
  TempDir tmp("abcmle_ingest");

  write_text(tmp.path / "plain.csv", "price\n1.0\n2.5\n\n3.5\n");
  const RawSeries plain = ingest_csv(tmp.path / "plain.csv");
  CHECK(plain.values == std::vector<double>{1.0, 2.5, 3.5});

  write_text(tmp.path / "dated.csv",
             "date,price\n2020-01-01,1.5\n2020-01-02,2.5\n");
  const RawSeries dated = ingest_csv(tmp.path / "dated.csv");
  CHECK(dated.values == std::vector<double>{1.5, 2.5});

  write_text(tmp.path / "bad.csv", "1.0\nxyz\n");
  try {
    ingest_csv(tmp.path / "bad.csv");
    FAIL("expected a parse error");
  } catch (const ConfigError& error) {
    CHECK(std::string(error.what()).find("line 2") != std::string::npos);
  }

  write_text(tmp.path / "inf.csv", "1.0\ninf\n");
  try {
    ingest_csv(tmp.path / "inf.csv");
    FAIL("expected a non-finite error");
  } catch (const ConfigError& error) {
    CHECK(std::string(error.what()).find("non-finite") != std::string::npos);
    CHECK(std::string(error.what()).find("line 2") != std::string::npos);
  }

  write_text(tmp.path / "empty.csv", "");
  CHECK_THROWS_AS(ingest_csv(tmp.path / "empty.csv"), ConfigError);
  CHECK_THROWS_AS(ingest_csv(tmp.path / "does_not_exist.csv"), ConfigError);
}

TEST_CASE("log-return preprocessing") {
  const std::vector<double> constant = {5.0, 5.0, 5.0, 5.0};
  const std::vector<double> zero_returns = preprocess_log_returns(constant);
  CHECK(zero_returns == std::vector<double>{0.0, 0.0, 0.0});

  const std::vector<double> pair = {1.0, std::exp(0.01)};
  const std::vector<double> one = preprocess_log_returns(pair);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-12));  // percent units

  CHECK_THROWS_AS(preprocess_log_returns(std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(preprocess_log_returns(std::vector<double>{1.0, -2.0}),
                  DomainError);
  CHECK_THROWS_AS(preprocess_log_returns(std::vector<double>{0.0, 1.0}),
                  DomainError);
}

TEST_CASE("autoregression residuals") {
  SUBCASE("an exact linear recursion is fit exactly") {
    std::vector<double> series = {0.3};
    for (int t = 0; t < 59; ++t) {
      series.push_back(0.2 + 0.7 * series.back());
    }
    const Ar1Fit fit = ar1_residuals(series);
    CHECK(fit.slope == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(fit.intercept == doctest::Approx(0.2).epsilon(1e-8));
    REQUIRE(fit.residuals.size() == series.size() - 1);
    for (double e : fit.residuals) CHECK(std::abs(e) < 1e-10);
  }

  SUBCASE("white noise fits a near-zero coefficient") {
    Rng rng(515);
    std::vector<double> noise;
    const std::size_t m = 20000;
    noise.reserve(m);
    for (std::size_t i = 0; i < m; ++i) noise.push_back(rng.normal());
    const Ar1Fit fit = ar1_residuals(noise);
    const double band = 3.0 / std::sqrt(static_cast<double>(m));
    CHECK(std::abs(fit.slope) < band);
    CHECK(std::abs(fit.intercept) < band);
    REQUIRE(fit.residuals.size() == m - 1);
    CHECK(testsupport::sample_variance(fit.residuals) ==
          doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("degenerate input is rejected") {
    CHECK_THROWS_AS(ar1_residuals(std::vector<double>{1.0, 1.0, 1.0, 1.0}),
                    Error);
    CHECK_THROWS_AS(ar1_residuals(std::vector<double>{1.0, 2.0}), ConfigError);
  }
}

TEST_CASE("model-check probabilities are sorted, bounded, and scored") {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.7, 0.3, 0.4}, model->domain());
  Rng rng(808);
  const std::vector<double> raw = model->simulate(theta, 200, rng);
  const std::vector<double> values =
      corrupt_observations(raw, 0.1, false, derive_seed(808, 2)).values;

  const PitResult pit = pit_model_check(*model, theta, values, 0.1, 300, 909);
  REQUIRE(pit.sorted_values.size() == values.size());
  CHECK(std::is_sorted(pit.sorted_values.begin(), pit.sorted_values.end()));
  for (double v : pit.sorted_values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Recompute the Kolmogorov-Smirnov statistic from the sorted values.
  const double n = static_cast<double>(pit.sorted_values.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < pit.sorted_values.size(); ++i) {
    const double v = pit.sorted_values[i];
    ks = std::max(ks, (static_cast<double>(i) + 1.0) / n - v);
    ks = std::max(ks, v - static_cast<double>(i) / n);
  }
  CHECK(pit.ks_statistic == doctest::Approx(ks).epsilon(1e-15));
  // At the data-generating parameters the check should not reject.
  CHECK(pit.ks_statistic < 1.63 / std::sqrt(n));
}

TEST_CASE("output root honors the environment override") {
  setenv("ABCMLE_OUTPUT_ROOT", "/tmp/abcmle_root_probe", 1);
  CHECK(output_root() == fs::path("/tmp/abcmle_root_probe"));
  setenv("ABCMLE_OUTPUT_ROOT", "", 1);
  CHECK(output_root() == fs::current_path());
  unsetenv("ABCMLE_OUTPUT_ROOT");
  CHECK(output_root() == fs::current_path());
}

TEST_CASE("experiment runner emits consistent, reproducible artifacts") {
  json doc = base_config();
  doc["replicates"] = 3;
  doc["observation_count"] = 40;
  doc["particle_count"] = 60;
  doc["iterations"] = 6;
  doc["average_last"] = 3;
  doc["seed"] = 11;
  doc["record_stride"] = 2;
  doc["output_dir"] = "exp_smoke";
  const ExperimentConfig config = parse_config(doc.dump(), "<test>");

  TempDir tmp1("abcmle_exp1");
  TempDir tmp2("abcmle_exp2");
  setenv("ABCMLE_OUTPUT_ROOT", tmp1.path.c_str(), 1);
  const ExperimentResult result = run_experiment(config);
  CHECK(result.replicates == 3);
  CHECK(result.failed == 0);
  CHECK(result.output_dir == tmp1.path / "exp_smoke");
  REQUIRE(fs::exists(result.summary_path));

  json summary;
  {
    std::ifstream in(result.summary_path);
    in >> summary;
  }
  CHECK(summary["failed"] == 0);
  CHECK(summary["model"] == "gaussian_surrogate");
  CHECK(summary["mode"] == "batch");
  CHECK(summary["config_hash"] == config.config_hash);
  REQUIRE(summary["runs"].size() == 3);

  // Recompute the cross-replicate moments from the emitted trace files; the
  // summary must agree with its own artifacts.
  std::vector<std::vector<double>> finals;
  for (const json& entry : summary["runs"]) {
    CHECK(entry["completed"] == true);
    const RunRecord record =
        read_run_record(result.output_dir / entry["file"].get<std::string>());
    CHECK(record.completed);
    CHECK(record.updates == 6);
    const std::vector<double> from_summary =
        entry["final_theta"].get<std::vector<double>>();
    REQUIRE(record.final_theta.size() == from_summary.size());
    for (std::size_t k = 0; k < from_summary.size(); ++k) {
      CHECK(record.final_theta[k] == from_summary[k]);
    }
    finals.push_back(record.final_theta);
  }
  std::vector<double> mean(3, 0.0);
  for (const auto& row : finals) {
    for (std::size_t k = 0; k < 3; ++k) mean[k] += row[k];
  }
  for (double& m : mean) m /= static_cast<double>(finals.size());
  std::vector<double> variance(3, 0.0);
  for (const auto& row : finals) {
    for (std::size_t k = 0; k < 3; ++k) {
      variance[k] += (row[k] - mean[k]) * (row[k] - mean[k]);
    }
  }
  for (double& v : variance) v /= static_cast<double>(finals.size() - 1);
  const std::vector<double> summary_mean =
      summary["final_theta_mean"].get<std::vector<double>>();
  const std::vector<double> summary_variance =
      summary["final_theta_variance"].get<std::vector<double>>();
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(summary_mean[k] == doctest::Approx(mean[k]).epsilon(1e-12));
    CHECK(summary_variance[k] == doctest::Approx(variance[k]).epsilon(1e-12));
  }

  // The same config in a different output root produces byte-identical files.
  setenv("ABCMLE_OUTPUT_ROOT", tmp2.path.c_str(), 1);
  const ExperimentResult rerun = run_experiment(config);
  CHECK(rerun.failed == 0);
  for (const char* name : {"run_1.csv", "run_2.csv", "run_3.csv",
                           "summary.json"}) {
    CHECK(read_bytes(tmp1.path / "exp_smoke" / name) ==
          read_bytes(tmp2.path / "exp_smoke" / name));
  }
  unsetenv("ABCMLE_OUTPUT_ROOT");
}

TEST_CASE("experiment runner records failing replicates and keeps going") {
  json doc = {{"mode", "batch"},
              {"model", "g_and_k"},
              {"theta_star", {2.0, 0.5, 10.0, 2.0}},
              {"observation_count", 5},
              {"epsilon", 1e-300},  // guaranteed weight collapse
              {"particle_count", 20},
              {"iterations", 2},
              {"average_last", 1},
              {"theta0", {2.0, 0.5, 10.0, 2.0}},
              {"replicates", 2},
              {"seed", 21},
              {"output_dir", "exp_fail"}};
  const ExperimentConfig config = parse_config(doc.dump(), "<test>");

  TempDir tmp("abcmle_exp_fail");
  setenv("ABCMLE_OUTPUT_ROOT", tmp.path.c_str(), 1);
  const ExperimentResult result = run_experiment(config);
  unsetenv("ABCMLE_OUTPUT_ROOT");
  CHECK(result.replicates == 2);
  CHECK(result.failed == 2);

  json summary;
  {
    std::ifstream in(result.summary_path);
    in >> summary;
  }
  CHECK(summary["failed"] == 2);
  REQUIRE(summary["runs"].size() == 2);
  for (const json& entry : summary["runs"]) {
    CHECK(entry["completed"] == false);
    const bool has_reason = entry.contains("abort_reason") ||
                            entry.contains("error");
    CHECK(has_reason);
  }
}
