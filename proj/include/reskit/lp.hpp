#pragma once

#include <limits>

#include "reskit/linalg.hpp"

// Dense bounded-variable primal simplex. Small problems only (a few hundred rows,
// a few thousand columns); every call is independent so it is safe to run from
// several threads.
namespace reskit::lp {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct Problem {
  Vector cost;  // minimise cost . x
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector lower;  // -inf allowed
  Vector upper;  // +inf allowed

  // Sized problem with no rows and x >= 0.
  static Problem with_variables(Eigen::Index n);
};

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Vector x;
  double objective = 0.0;
  long iterations = 0;
  double infeasibility = 0.0;  // phase-one residual
};

struct Options {
  double feasibility = 1e-9;
  double optimality = 1e-10;
  double pivot = 1e-11;
  long max_iterations = 200000;
};

Result solve(const Problem& problem, const Options& options = {});

}  // namespace reskit::lp
