// Microbenchmarks for the hot paths: a single filtering step under both
// score estimators (where the O(N) vs O(N^2) per-step cost shows directly),
// and the raw model samplers.

#include <vector>

#include <benchmark/benchmark.h>

#include "abcmle/models/registry.hpp"
#include "abcmle/rng.hpp"
#include "abcmle/smc/particle_filter.hpp"

namespace {

using namespace abcmle;

std::vector<double> surrogate_data(long n, std::uint64_t seed) {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  Rng rng(seed);
  return model->simulate(theta, n, rng);
}

void bench_filter_step(benchmark::State& state, ScoreMethod method) {
  const std::unique_ptr<Model> model = make_model("gaussian_surrogate");
  const ParameterVector theta({0.8, 0.5, 0.5}, model->domain());
  const std::vector<double> data = surrogate_data(64, 7);

  FilterOptions options;
  options.particle_count = static_cast<int>(state.range(0));
  options.epsilon = 0.1;
  options.score_method = method;

  for (auto _ : state) {
    ParticleFilter filter(*model, theta, options, 11);
    double sum = 0.0;
    for (double value : data) {
      sum += filter.step(value).log_likelihood_increment;
    }
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * data.size() * state.range(0));
}

void filter_path_space(benchmark::State& state) {
  bench_filter_step(state, ScoreMethod::PathSpace);
}
BENCHMARK(filter_path_space)->Arg(128)->Arg(256)->Arg(512)->Arg(1024);

void filter_marginal(benchmark::State& state) {
  bench_filter_step(state, ScoreMethod::Marginal);
}
BENCHMARK(filter_marginal)->Arg(128)->Arg(256)->Arg(512)->Arg(1024);

void model_simulate(benchmark::State& state, const char* name,
                    std::vector<double> theta_values) {
  const std::unique_ptr<Model> model = make_model(name);
  const ParameterVector theta(std::move(theta_values), model->domain());
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->simulate(theta, state.range(0), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void simulate_alpha_stable(benchmark::State& state) {
  model_simulate(state, "alpha_stable", {1.5, 0.5, 0.0, 0.5});
}
BENCHMARK(simulate_alpha_stable)->Arg(10000);

void simulate_g_and_k(benchmark::State& state) {
  model_simulate(state, "g_and_k", {2.0, 0.5, 10.0, 2.0});
}
BENCHMARK(simulate_g_and_k)->Arg(10000);

void simulate_sv_alpha_r(benchmark::State& state) {
  model_simulate(state, "sv_alpha_r", {1.9, 0.9, 0.1});
}
BENCHMARK(simulate_sv_alpha_r)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
