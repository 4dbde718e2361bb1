#pragma once

#include <stdexcept>
#include <string>

namespace lapfol {

// Input outside the domain of an operation (point off the manifold, non-unit
// direction, pole of a series).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration: unknown ids, bounds above the configured cap,
// non-positive tolerances.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller-side precondition failed (mismatched spaces, dρ(v1) != dρ(v2), ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The requested backend cannot serve this case.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A function declared basic is not constant along a sampled fiber.
class NotBasicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reynolds projection requested for an eigencomponent above the cutoff.
class CutoffExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical decision could not be made with the configured margins.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The affine tail model of a focal spectrum does not fit the observed roots.
class TailModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root multiplicity could not be resolved from the kernel analysis.
class MultiplicityAmbiguity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical integration failed to reach the requested accuracy.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace lapfol
