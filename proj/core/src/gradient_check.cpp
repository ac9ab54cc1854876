#include "abcmle/gradient_check.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "abcmle/rng.hpp"

namespace abcmle {

namespace {

// A parameter point comfortably inside the constraint set: intervals are
// sampled away from both ends, half-lines at a moderate offset from the
// bound, unbounded coordinates near the origin. The model's own projection
// is applied afterwards so excluded interior neighbourhoods are respected.
ParameterVector sample_interior_theta(const Model& model, Rng& rng) {
  const ParameterDomain& domain = model.domain();
  std::vector<double> values(domain.size(), 0.0);
  for (std::size_t k = 0; k < domain.size(); ++k) {
    const CoordinateDomain& coordinate = domain.coordinates[k];
    switch (coordinate.kind) {
      case DomainKind::Unbounded:
        values[k] = rng.uniform(-2.0, 2.0);
        break;
      case DomainKind::LowerBounded:
        values[k] = coordinate.lower + std::exp(rng.uniform(-2.0, 0.5));
        break;
      case DomainKind::Interval: {
        const double width = coordinate.upper - coordinate.lower;
        values[k] = rng.uniform(coordinate.lower + 0.05 * width,
                                coordinate.upper - 0.05 * width);
        break;
      }
    }
  }
  return model.clamp(ParameterVector(std::move(values), domain));
}

class EntryChecker {
 public:
  EntryChecker(std::string function, double tolerance, double delta)
      : tolerance_(tolerance), delta_(delta) {
    entry_.function = std::move(function);
  }

  void compare(const ParameterVector& theta,
               const std::function<double(const ParameterVector&)>& f,
               std::span<const double> analytic) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double step = delta_ * std::max(1.0, std::abs(theta[k]));
      std::vector<double> up = theta.values();
      std::vector<double> down = theta.values();
      up[k] += step;
      down[k] -= step;
      const double fd = (f(theta.with_values(std::move(up))) -
                         f(theta.with_values(std::move(down)))) /
                        (2.0 * step);
      const double error = std::abs(analytic[k] - fd) /
                           std::max({std::abs(analytic[k]), std::abs(fd), 1.0});
      ++entry_.checks;
      if (!(error <= tolerance_)) ++entry_.failures;
      if (error > entry_.max_error) entry_.max_error = error;
    }
  }

  GradientCheckEntry entry() const { return entry_; }

 private:
  GradientCheckEntry entry_;
  double tolerance_;
  double delta_;
};

}  // namespace

GradientCheckReport check_model_gradients(const Model& model, long points,
                                          double tolerance, std::uint64_t seed,
                                          double delta) {
  if (points < 1) {
    std::ostringstream os;
    os << "gradient check needs at least one point, got " << points;
    throw ConfigError(os.str());
  }
  if (!(tolerance > 0.0) || !(delta > 0.0)) {
    throw ConfigError("gradient check tolerance and step must be positive");
  }

  const int dim_state = model.state_dim();
  const int dim_aux = model.aux_dim();
  const int dim_theta = model.theta_dim();
  const bool has_chain = dim_state > 0;

  Rng rng(derive_seed(seed, 0x67726164ULL));
  EntryChecker tau_check("observation map", tolerance, delta);
  EntryChecker aux_check("auxiliary log-density", tolerance, delta);
  EntryChecker transition_check("transition log-density", tolerance, delta);
  EntryChecker initial_check("initial log-density", tolerance, delta);

  std::vector<double> x_prev(static_cast<std::size_t>(dim_state), 0.0);
  std::vector<double> x(static_cast<std::size_t>(dim_state), 0.0);
  std::vector<double> u(static_cast<std::size_t>(dim_aux), 0.0);
  std::vector<double> analytic(static_cast<std::size_t>(dim_theta), 0.0);

  for (long p = 0; p < points; ++p) {
    const ParameterVector theta = sample_interior_theta(model, rng);
    if (has_chain) {
      model.sample_initial(theta, x_prev, rng);
      model.sample_transition(theta, x_prev, x, rng);
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      model.sample_aux(theta, x, u, rng);
      if (std::abs(model.tau(theta, x, u)) <= 1e3) break;
    }

    model.grad_tau(theta, x, u, analytic);
    tau_check.compare(
        theta, [&](const ParameterVector& point) { return model.tau(point, x, u); },
        analytic);

    model.grad_log_aux(theta, x, u, analytic);
    aux_check.compare(
        theta,
        [&](const ParameterVector& point) { return model.log_aux(point, x, u); },
        analytic);

    if (has_chain) {
      model.grad_log_transition(theta, x_prev, x, analytic);
      transition_check.compare(
          theta,
          [&](const ParameterVector& point) {
            return model.log_transition(point, x_prev, x);
          },
          analytic);

      model.grad_log_initial(theta, x_prev, analytic);
      initial_check.compare(
          theta,
          [&](const ParameterVector& point) {
            return model.log_initial(point, x_prev);
          },
          analytic);
    }
  }

  GradientCheckReport report;
  report.points = points;
  report.tolerance = tolerance;
  report.entries.push_back(tau_check.entry());
  report.entries.push_back(aux_check.entry());
  if (has_chain) {
    report.entries.push_back(transition_check.entry());
    report.entries.push_back(initial_check.entry());
  }
  return report;
}

}  // namespace abcmle
