#pragma once

#include <stdexcept>
#include <string>

namespace smec {

/// The conic solver failed (max iterations or numerical breakdown).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A relaxation was reported primal infeasible: the set is empty or
/// numerically empty at this order.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// A method precondition that the caller asserted does not hold
/// (branch constraint on S^3, convexity for hit-and-run, ...).
struct AssumptionError : std::runtime_error {
  explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smec
