#include "abcmle/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace abcmle {

namespace {

// Largest |v| fed to exp / logistic before we clamp. Keeps from_unconstrained
// finite for any finite input instead of overflowing to inf.
constexpr double kMaxExpArg = 700.0;

[[noreturn]] void throw_domain(const CoordinateDomain& c, double value,
                               const char* why) {
  std::ostringstream os;
  os.precision(17);
  os << "parameter '" << c.name << "' = " << value << " " << why << " "
     << c.describe();
  throw DomainError(os.str());
}

}  // namespace

CoordinateDomain CoordinateDomain::unbounded(std::string name) {
  CoordinateDomain c;
  c.name = std::move(name);
  c.kind = DomainKind::Unbounded;
  return c;
}

CoordinateDomain CoordinateDomain::lower_bounded(std::string name,
                                                 double lower, bool closed) {
  CoordinateDomain c;
  c.name = std::move(name);
  c.kind = DomainKind::LowerBounded;
  c.lower = lower;
  c.lower_closed = closed;
  return c;
}

CoordinateDomain CoordinateDomain::interval(std::string name, double lower,
                                            double upper, bool lower_closed,
                                            bool upper_closed) {
  CoordinateDomain c;
  c.name = std::move(name);
  c.kind = DomainKind::Interval;
  c.lower = lower;
  c.upper = upper;
  c.lower_closed = lower_closed;
  c.upper_closed = upper_closed;
  return c;
}

bool CoordinateDomain::contains(double value) const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case DomainKind::Unbounded:
      return true;
    case DomainKind::LowerBounded:
      return lower_closed ? value >= lower : value > lower;
    case DomainKind::Interval: {
      const bool lo = lower_closed ? value >= lower : value > lower;
      const bool hi = upper_closed ? value <= upper : value < upper;
      return lo && hi;
    }
  }
  return false;
}

bool CoordinateDomain::interior(double value) const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case DomainKind::Unbounded:
      return true;
    case DomainKind::LowerBounded:
      return value > lower;
    case DomainKind::Interval:
      return value > lower && value < upper;
  }
  return false;
}

double CoordinateDomain::to_unconstrained(double value) const {
  if (!contains(value)) throw_domain(*this, value, "lies outside");
  if (!interior(value))
    throw_domain(*this, value,
                 "sits on the boundary of; the unconstrained map needs a "
                 "strictly interior point in");
  switch (kind) {
    case DomainKind::Unbounded:
      return value;
    case DomainKind::LowerBounded:
      return std::log(value - lower);
    case DomainKind::Interval: {
      const double s = (value - lower) / (upper - lower);
      return std::log(s) - std::log1p(-s);
    }
  }
  return value;
}

double CoordinateDomain::from_unconstrained(double v) const {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite unconstrained coordinate for parameter '" << name << "'";
    throw DomainError(os.str());
  }
  switch (kind) {
    case DomainKind::Unbounded:
      return v;
    case DomainKind::LowerBounded: {
      double value = lower + std::exp(std::min(v, kMaxExpArg));
      if (value <= lower)  // exp underflowed against a large |lower|
        value = std::nextafter(lower, std::numeric_limits<double>::infinity());
      return value;
    }
    case DomainKind::Interval: {
      const double vc = std::clamp(v, -kMaxExpArg, kMaxExpArg);
      const double s = 1.0 / (1.0 + std::exp(-vc));
      double value = lower + (upper - lower) * s;
      if (value <= lower)
        value = std::nextafter(lower, upper);
      else if (value >= upper)
        value = std::nextafter(upper, lower);
      return value;
    }
  }
  return v;
}

double CoordinateDomain::jacobian(double value) const {
  switch (kind) {
    case DomainKind::Unbounded:
      return 1.0;
    case DomainKind::LowerBounded:
      return value - lower;
    case DomainKind::Interval:
      return (value - lower) * (upper - value) / (upper - lower);
  }
  return 1.0;
}

std::string CoordinateDomain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case DomainKind::Unbounded:
      os << "(-inf, inf)";
      break;
    case DomainKind::LowerBounded:
      os << (lower_closed ? "[" : "(") << lower << ", inf)";
      break;
    case DomainKind::Interval:
      os << (lower_closed ? "[" : "(") << lower << ", " << upper
         << (upper_closed ? "]" : ")");
      break;
  }
  return os.str();
}

std::vector<std::string> ParameterDomain::names() const {
  std::vector<std::string> out;
  out.reserve(coordinates.size());
  for (const auto& c : coordinates) out.push_back(c.name);
  return out;
}

ParameterVector::ParameterVector(std::vector<double> values,
                                 ParameterDomain domain)
    : values_(std::move(values)), domain_(std::move(domain)) {
  if (values_.size() != domain_.size()) {
    std::ostringstream os;
    os << "parameter vector has " << values_.size()
       << " coordinates but the domain declares " << domain_.size();
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const auto& c = domain_.coordinates[i];
    if (!c.contains(values_[i])) throw_domain(c, values_[i], "lies outside");
  }
}

ParameterVector ParameterVector::with_values(std::vector<double> values) const {
  return ParameterVector(std::move(values), domain_);
}

std::vector<double> to_unconstrained(const ParameterVector& theta) {
  std::vector<double> v(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    v[i] = theta.domain().coordinates[i].to_unconstrained(theta[i]);
  return v;
}

ParameterVector from_unconstrained(const ParameterDomain& domain,
                                   std::span<const double> v) {
  if (v.size() != domain.size()) {
    std::ostringstream os;
    os << "unconstrained vector has " << v.size()
       << " coordinates but the domain declares " << domain.size();
    throw DomainError(os.str());
  }
  std::vector<double> values(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    values[i] = domain.coordinates[i].from_unconstrained(v[i]);
  return ParameterVector(std::move(values), domain);
}

std::vector<double> unconstrained_jacobian(const ParameterVector& theta) {
  std::vector<double> j(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    j[i] = theta.domain().coordinates[i].jacobian(theta[i]);
  return j;
}

}  // namespace abcmle
