#include "abcmle/mle/schedule.hpp"

#include <cmath>
#include <sstream>

#include "abcmle/errors.hpp"

namespace abcmle {

double StepSchedule::gamma(long j) const {
  return a * std::pow(static_cast<double>(j + t0), -b);
}

void validate_schedule(const StepSchedule& schedule, std::size_t dim) {
  if (!(schedule.a >= 0.0) || !std::isfinite(schedule.a)) {
    std::ostringstream os;
    os << "schedule scale a must be nonnegative and finite, got " << schedule.a;
    throw ConfigError(os.str());
  }
  if (!(schedule.b > 0.5) || !(schedule.b <= 1.0)) {
    std::ostringstream os;
    os << "schedule decay exponent b must lie in (0.5, 1], got " << schedule.b;
    throw ConfigError(os.str());
  }
  if (schedule.t0 < 0) {
    std::ostringstream os;
    os << "schedule offset t0 must be nonnegative, got " << schedule.t0;
    throw ConfigError(os.str());
  }
  if (!schedule.multipliers.empty() && schedule.multipliers.size() != dim) {
    std::ostringstream os;
    os << "schedule has " << schedule.multipliers.size()
       << " per-coordinate multipliers but the model has " << dim
       << " parameters";
    throw ConfigError(os.str());
  }
  for (double m : schedule.multipliers) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      std::ostringstream os;
      os << "schedule multipliers must be strictly positive and finite, got "
         << m;
      throw ConfigError(os.str());
    }
  }
}

}  // namespace abcmle
