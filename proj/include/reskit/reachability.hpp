#pragma once

#include <optional>
#include <vector>

#include "reskit/resilience.hpp"
#include "reskit/zonotope.hpp"

namespace reskit {

inline constexpr long default_generator_cap = 50000;

// Inner approximations of the reachable sets of x' = A x + z, z in Z, at
// times i*dt, i = 0..N.
struct ReachTube {
  std::vector<double> times;
  std::vector<Zonotope> sets;
  Vector x0;
  double horizon = 0.0;
  int steps = 0;
};

// Zonotope of one step of piecewise-constant input: generator i is the
// integral over [0, dt] of exp(A (dt - s)) g_i.
Zonotope step_input_zonotope(const Matrix& A, double dt, const Matrix& gens);

ReachTube reach_tube(const Matrix& A, const Zonotope& input_set, const Vector& x0, double T, int N,
                     long generator_cap = default_generator_cap);
ReachTube reach_tube(const Matrix& A, const ZSet& zset, const Vector& x0, double T, int N,
                     long generator_cap = default_generator_cap);

Interval extent(const ReachTube& tube, int step, int dim);
std::optional<Interval> slice_extent(const ReachTube& tube, int step, int dim, int fixed, double value);

// Smallest grid time i*dt <= t_max with x_tg in the i-th inner set; nullopt when
// the target is never contained. Grid times carry a +-dt uncertainty.
std::optional<double> min_time_upper_bound(const Matrix& A, const Zonotope& input_set, const Vector& x0,
                                           const Vector& x_tg, double dt, double t_max,
                                           long generator_cap = default_generator_cap);
std::optional<double> min_time_upper_bound(const Matrix& A, const ZSet& zset, const Vector& x0, const Vector& x_tg,
                                           double dt, double t_max, long generator_cap = default_generator_cap);

std::optional<double> nominal_time_oracle(const LinearSystem& sys, const Vector& x0, const Vector& x_tg, double dt,
                                          double t_max, long generator_cap = default_generator_cap);
std::optional<double> malfunction_time_oracle(const LinearSystem& sys, const ControlSplit& split, const Vector& x0,
                                              const Vector& x_tg, double dt, double t_max,
                                              long generator_cap = default_generator_cap);

}  // namespace reskit
