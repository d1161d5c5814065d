#pragma once

#include <stdexcept>
#include <string>

namespace ipmforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument to a library entry point (bad dimensions requested, bad flag value).
struct InvalidArgument : Error {
  using Error::Error;
};

// Operand shapes do not conform.
struct ShapeError : Error {
  using Error::Error;
};

// A NaN/Inf entered or left an operation.
struct NotFiniteError : Error {
  using Error::Error;
};

// Cholesky pivot at or below the threshold: the matrix is not (numerically) SPD.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// A point is outside the strict interior {x | Ax < b}.
struct NotStrictlyInterior : Error {
  NotStrictlyInterior(int row_, double slack_)
      : Error("not strictly interior: row " + std::to_string(row_) +
              " has slack " + std::to_string(slack_)),
        row(row_),
        slack(slack_) {}
  int row;
  double slack;
};

// Analytic centering failed to reach the target decrement within the iteration cap.
struct CenteringDivergence : Error {
  using Error::Error;
};

// The cost has (numerically) zero local norm: every feasible point is optimal.
struct DegenerateCost : Error {
  using Error::Error;
};

// Malformed JSON input or a field with the wrong type/shape.
struct SchemaError : Error {
  using Error::Error;
};

// Oracle instance outside the enumeration guard.
struct GuardExceeded : Error {
  using Error::Error;
};

// Vertex enumeration found no feasible basic point.
struct NoFeasibleVertex : Error {
  using Error::Error;
};

// A generated kernel failed structural validation.
struct IllFormedKernel : Error {
  using Error::Error;
};

// A checked interpretation hit a violated contract.
struct ContractViolation : Error {
  ContractViolation(std::string tag_, int k_, double measured_)
      : Error("contract violation [" + tag_ + "] at iteration " +
              std::to_string(k_) + ", measured " + std::to_string(measured_)),
        tag(std::move(tag_)),
        k(k_),
        measured(measured_) {}
  std::string tag;
  int k;
  double measured;
};

}  // namespace ipmforge
