#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abcmle/model.hpp"

namespace abcmle {

struct GradientCheckEntry {
  std::string function;   // which model gradient was compared
  long checks = 0;        // coordinate comparisons performed
  long failures = 0;      // comparisons beyond tolerance
  double max_error = 0.0; // worst scaled deviation observed
};

struct GradientCheckReport {
  long points = 0;
  double tolerance = 0.0;
  std::vector<GradientCheckEntry> entries;

  long failures() const {
    long total = 0;
    for (const auto& entry : entries) total += entry.failures;
    return total;
  }
  bool passed() const { return failures() == 0; }
};

// Compares every analytic parameter gradient the model implements against
// central finite differences at `points` randomly sampled parameter values,
// with latent states and auxiliary draws taken from the model's own laws.
// The deviation measure per coordinate is
//   |analytic - fd| / max(|analytic|, |fd|, 1),
// a relative error with an absolute floor so exact zero gradients compare
// cleanly. Auxiliary draws whose observation map exceeds 1e3 in magnitude
// are redrawn: central differences lose too many digits to cancellation at
// extreme heavy-tail values to say anything meaningful there.
GradientCheckReport check_model_gradients(const Model& model, long points,
                                          double tolerance, std::uint64_t seed,
                                          double delta = 1e-6);

}  // namespace abcmle
