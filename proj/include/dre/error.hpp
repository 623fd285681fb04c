#pragma once

#include <stdexcept>
#include <string>

namespace dre {

// Base class for all failures raised by the solver library.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatches between factors, operators and blocks.
class DimensionError : public SolverError {
 public:
  explicit DimensionError(const std::string& msg) : SolverError(msg) {}
};

// Krylov exponential action failed to converge; carries the last
// residual estimate seen before giving up.
class KrylovError : public SolverError {
 public:
  KrylovError(const std::string& msg, double residual)
      : SolverError(msg), residual_estimate(residual) {}
  double residual_estimate;
};

// Adaptive driver failure (step size underflow or too many rejects).
// The partial trajectory up to the failure is kept by the caller.
class StepControlError : public SolverError {
 public:
  explicit StepControlError(const std::string& msg) : SolverError(msg) {}
};

// Invalid run specification (bad method name, unsupported k, oracle cap
// exceeded).  The CLI maps this to exit code 2.
class UsageError : public SolverError {
 public:
  explicit UsageError(const std::string& msg) : SolverError(msg) {}
};

}  // namespace dre
