#include "abcmle/observation.hpp"

#include <sstream>

#include "abcmle/errors.hpp"
#include "abcmle/rng.hpp"

namespace abcmle {

namespace {

void validate_raw(std::span<const double> raw, double epsilon) {
  if (raw.empty()) throw ConfigError("observation series is empty");
  if (!(epsilon > 0.0)) {
    std::ostringstream os;
    os << "kernel scale epsilon must be strictly positive, got " << epsilon
       << "; the estimator has no epsilon = 0 limit mode";
    throw ConfigError(os.str());
  }
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (!std::isfinite(raw[t])) {
      std::ostringstream os;
      os << "observation series contains a non-finite value at index " << t;
      throw ConfigError(os.str());
    }
  }
}

}  // namespace

std::vector<double> bounded_transform(std::span<const double> y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = bounded_transform(y[i]);
  return out;
}

NoisySeries corrupt_observations(std::span<const double> raw, double epsilon,
                                 bool apply_transform,
                                 std::uint64_t noise_seed) {
  validate_raw(raw, epsilon);
  NoisySeries s;
  s.epsilon = epsilon;
  s.transformed = apply_transform;
  s.noise_seed = noise_seed;
  s.values.resize(raw.size());
  Rng rng(noise_seed);
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const double base = apply_transform ? bounded_transform(raw[t]) : raw[t];
    s.values[t] = base + epsilon * rng.normal();
  }
  return s;
}

NoisySeries transform_only(std::span<const double> raw, double epsilon,
                           bool apply_transform) {
  validate_raw(raw, epsilon);
  NoisySeries s;
  s.epsilon = epsilon;
  s.transformed = apply_transform;
  s.noise_seed = 0;
  s.values.resize(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t)
    s.values[t] = apply_transform ? bounded_transform(raw[t]) : raw[t];
  return s;
}

}  // namespace abcmle
