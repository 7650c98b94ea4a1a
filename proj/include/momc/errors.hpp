#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace momc {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input shape/config problems (bad sizes, malformed JSON, unknown names).
struct DimensionMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct UnknownFixture : Error { using Error::Error; };

// A state handed to a kernel lies outside its declared space.
struct DomainError : Error { using Error::Error; };

// An enumeration or exact engine exceeded its configured size cap.
struct CapExceeded : Error { using Error::Error; };

// A linear solve / numerical routine failed its residual check.
struct SolverFailure : Error { using Error::Error; };

// A tail summation did not fall below threshold within the horizon.
struct Nonconvergent : Error { using Error::Error; };

// An iteration hit its step limit before meeting its stopping rule.
struct NotConverged : Error { using Error::Error; };

// Occupation-measure summation diverged (regeneration condition fails).
struct DivergentCycle : Error { using Error::Error; };

// Requested split has zero mass into A or B.
struct BadSplit : Error { using Error::Error; };

// No anchor state yields a positive split.
struct NoSplit : Error { using Error::Error; };

// A coupling policy cannot be used from the given configuration/state.
struct PolicyInapplicable : Error { using Error::Error; };

// Violations of guarantees the theory promises.  If one of these fires the
// artifact itself is wrong, not the input; the CLI maps them to exit code 2.
struct InvariantViolation : Error { using Error::Error; };

struct BoundViolated : InvariantViolation {
  std::size_t step;
  double lhs, rhs;
  BoundViolated(const std::string& what, std::size_t step_, double lhs_, double rhs_)
      : InvariantViolation(what), step(step_), lhs(lhs_), rhs(rhs_) {}
};

struct MonotoneViolation : InvariantViolation { using InvariantViolation::InvariantViolation; };

// One of the achievability hypotheses fails; carries the offending state.
struct HypothesisFails : Error {
  int witness_state;
  HypothesisFails(const std::string& what, int witness)
      : Error(what), witness_state(witness) {}
};

}  // namespace momc
