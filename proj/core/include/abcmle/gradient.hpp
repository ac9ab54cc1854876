#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "abcmle/errors.hpp"

namespace abcmle {

// Which coordinate system a score/gradient lives in.
//   Natural       - derivatives with respect to the model parameters as
//                   declared (alpha, beta, ...). What the model-level
//                   gradient functions return and what oracle checks test.
//   Unconstrained - derivatives with respect to the transformed coordinates
//                   the optimizer walks in; Natural times d theta / d v.
enum class GradientCoordinates { Natural, Unconstrained };

struct GradientVector {
  std::vector<double> values;
  GradientCoordinates coordinates = GradientCoordinates::Natural;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Throws EvaluationError if any entry is NaN or infinite.
inline void check_finite(std::span<const double> values, const char* what,
                         const std::vector<double>& theta) {
  for (double v : values)
    if (!std::isfinite(v))
      throw EvaluationError(std::string(what) + " is non-finite", theta);
}

inline void check_finite(double value, const char* what,
                         const std::vector<double>& theta,
                         std::vector<double> state = {}) {
  if (!std::isfinite(value))
    throw EvaluationError(std::string(what) + " is non-finite", theta,
                          std::move(state));
}

}  // namespace abcmle
