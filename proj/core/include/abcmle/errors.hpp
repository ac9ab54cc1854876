#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace abcmle {

// Base class for all library errors. Callers that only care about "this run
// failed" can catch this; the subclasses distinguish user mistakes
// (ConfigError, DomainError) from runtime numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration (bad JSON, missing
// fields, out-of-range scalar settings, unknown model names, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A parameter vector violates its declared constraint set, or an operation
// requires a strictly interior point and was handed a boundary value.
class DomainError : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline std::string format_vector(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ")";
  return os.str();
}
}  // namespace detail

// A density, gradient, or observation function produced a non-finite value.
// Carries the offending parameter vector and, when available, the state that
// triggered it, so failed runs are diagnosable from the message alone.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::vector<double> theta,
                  std::vector<double> state = {})
      : Error(compose(what, theta, state)),
        theta_(std::move(theta)),
        state_(std::move(state)) {}

  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& state() const { return state_; }

 private:
  static std::string compose(const std::string& what,
                             const std::vector<double>& theta,
                             const std::vector<double>& state) {
    std::string msg = what + " at theta=" + detail::format_vector(theta);
    if (!state.empty()) msg += " state=" + detail::format_vector(state);
    return msg;
  }

  std::vector<double> theta_;
  std::vector<double> state_;
};

// All particle weights vanished at some filtering step: the kernel scale is
// too small for the current parameter value. Deliberately fatal rather than
// silently reset, so runs cannot quietly produce garbage.
class DegeneracyError : public Error {
 public:
  DegeneracyError(long step, double epsilon, std::vector<double> theta,
                  const char* what = "all particle weights are zero")
      : Error(compose(step, epsilon, theta, what)),
        step_(step),
        epsilon_(epsilon),
        theta_(std::move(theta)) {}

  long step() const { return step_; }
  double epsilon() const { return epsilon_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  static std::string compose(long step, double epsilon,
                             const std::vector<double>& theta,
                             const char* what) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at step " << step
       << " (kernel scale epsilon=" << epsilon
       << ", theta=" << detail::format_vector(theta)
       << "); increase epsilon or the particle count";
    return os.str();
  }

  long step_;
  double epsilon_;
  std::vector<double> theta_;
};

}  // namespace abcmle
