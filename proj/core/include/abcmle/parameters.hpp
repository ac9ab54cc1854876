#pragma once

#include <span>
#include <string>
#include <vector>

#include "abcmle/errors.hpp"

namespace abcmle {

// Constraint set of a single parameter coordinate, together with the smooth
// bijection used to optimize it on an unconstrained scale:
//   Unbounded      -> identity
//   LowerBounded   -> log(theta - lower)        (half-line)
//   Interval       -> logit((theta - lower) / (upper - lower))
enum class DomainKind { Unbounded, LowerBounded, Interval };

struct CoordinateDomain {
  std::string name;
  DomainKind kind = DomainKind::Unbounded;
  double lower = 0.0;  // meaningful for LowerBounded and Interval
  double upper = 0.0;  // meaningful for Interval
  bool lower_closed = false;
  bool upper_closed = false;

  static CoordinateDomain unbounded(std::string name);
  static CoordinateDomain lower_bounded(std::string name, double lower,
                                        bool closed = false);
  static CoordinateDomain interval(std::string name, double lower,
                                   double upper, bool lower_closed = false,
                                   bool upper_closed = false);

  // Membership in the declared constraint set (closed ends included).
  bool contains(double value) const;

  // Strict interior membership; the map to unconstrained coordinates is only
  // defined there.
  bool interior(double value) const;

  // Forward map theta -> v. Throws DomainError on boundary or exterior
  // values, e.g. a variance pinned at exactly zero.
  double to_unconstrained(double value) const;

  // Inverse map v -> theta. Total: every finite v yields a point strictly
  // inside the constraint set (saturation near the ends is nudged inward by
  // one representable value).
  double from_unconstrained(double v) const;

  // d theta / d v evaluated at theta; the chain-rule factor that converts
  // natural-coordinate gradients to unconstrained-coordinate gradients.
  double jacobian(double value) const;

  std::string describe() const;
};

struct ParameterDomain {
  std::vector<CoordinateDomain> coordinates;

  std::size_t size() const { return coordinates.size(); }
  std::vector<std::string> names() const;
};

// A parameter vector validated against its domain at construction.
class ParameterVector {
 public:
  ParameterVector(std::vector<double> values, ParameterDomain domain);

  const std::vector<double>& values() const { return values_; }
  const ParameterDomain& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  // Same domain, new values (validated).
  ParameterVector with_values(std::vector<double> values) const;

 private:
  std::vector<double> values_;
  ParameterDomain domain_;
};

// Coordinate-wise transform of a whole vector.
std::vector<double> to_unconstrained(const ParameterVector& theta);
ParameterVector from_unconstrained(const ParameterDomain& domain,
                                   std::span<const double> v);

// Diagonal of d theta / d v at theta, one entry per coordinate.
std::vector<double> unconstrained_jacobian(const ParameterVector& theta);

}  // namespace abcmle
