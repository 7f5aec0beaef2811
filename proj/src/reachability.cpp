#include "reskit/reachability.hpp"

#include <cmath>

#include "reskit/errors.hpp"

namespace reskit {

namespace {

void check_grid(const Matrix& A, const Vector& x0, double dt) {
  check_square(A, "A");
  if (x0.size() != A.rows()) throw DimensionError("initial state has the wrong length");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("time step must be positive");
}

const Zonotope& require_nonempty(const ZSet& z) {
  if (z.empty()) throw PreconditionError("the control-deficit set Z is empty");
  return *z.inner;
}

// Rolls the recursion c <- E c + v, G <- [E G, V] forward one step at a time.
class Stepper {
 public:
  Stepper(const Matrix& A, const Zonotope& Z, const Vector& x0, double dt, long cap)
      : E_(matrix_exponential(A, dt)), c_(x0), G_(x0.size(), 0), cap_(cap) {
    if (Z.dim() != A.rows()) throw DimensionError("input set dimension differs from A");
    const Matrix Phi = exponential_integral(A, dt);
    V_ = Phi * Z.generators();
    v_ = Phi * Z.center();
  }

  void advance() {
    if (G_.cols() + V_.cols() > cap_)
      throw CapacityError("reach tube: generator count would exceed the cap of " + std::to_string(cap_));
    Matrix next(G_.rows(), G_.cols() + V_.cols());
    next << E_ * G_, V_;
    G_.swap(next);
    c_ = E_ * c_ + v_;
  }

  Zonotope current() const { return Zonotope(c_, G_); }
  const Vector& center() const { return c_; }
  const Matrix& generators() const { return G_; }

 private:
  Matrix E_;
  Matrix V_;
  Vector v_;
  Vector c_;
  Matrix G_;
  long cap_;
};

}  // namespace

Zonotope step_input_zonotope(const Matrix& A, double dt, const Matrix& gens) {
  check_square(A, "A");
  if (!(dt > 0.0)) throw ArgumentError("step_input_zonotope: dt must be positive");
  if (gens.cols() == 0) throw ArgumentError("step_input_zonotope: no generators");
  if (gens.rows() != A.rows()) throw DimensionError("step_input_zonotope: generator length differs from A");
  return Zonotope(Vector::Zero(A.rows()), exponential_integral(A, dt) * gens);
}

ReachTube reach_tube(const Matrix& A, const Zonotope& input_set, const Vector& x0, double T, int N,
                     long generator_cap) {
  if (N < 1) throw ArgumentError("reach_tube: N must be at least 1");
  if (!(T > 0.0)) throw ArgumentError("reach_tube: horizon must be positive");
  const double dt = T / N;
  check_grid(A, x0, dt);
  ReachTube tube;
  tube.x0 = x0;
  tube.horizon = T;
  tube.steps = N;
  Stepper st(A, input_set, x0, dt, generator_cap);
  tube.times.push_back(0.0);
  tube.sets.push_back(Zonotope::point(x0));
  for (int i = 1; i <= N; ++i) {
    st.advance();
    tube.times.push_back(i == N ? T : i * dt);
    tube.sets.push_back(st.current());
  }
  return tube;
}

ReachTube reach_tube(const Matrix& A, const ZSet& zset, const Vector& x0, double T, int N, long generator_cap) {
  return reach_tube(A, require_nonempty(zset), x0, T, N, generator_cap);
}

Interval extent(const ReachTube& tube, int step, int dim) {
  if (step < 0 || step >= static_cast<int>(tube.sets.size())) throw ArgumentError("extent: step out of range");
  return extent(tube.sets[static_cast<std::size_t>(step)], dim);
}

std::optional<Interval> slice_extent(const ReachTube& tube, int step, int dim, int fixed, double value) {
  if (step < 0 || step >= static_cast<int>(tube.sets.size())) throw ArgumentError("slice_extent: step out of range");
  return slice_extent(tube.sets[static_cast<std::size_t>(step)], dim, fixed, value);
}

std::optional<double> min_time_upper_bound(const Matrix& A, const Zonotope& input_set, const Vector& x0,
                                           const Vector& x_tg, double dt, double t_max, long generator_cap) {
  check_grid(A, x0, dt);
  if (x_tg.size() != x0.size()) throw DimensionError("target has the wrong length");
  if (!(t_max >= dt)) throw ArgumentError("min_time_upper_bound: t_max must be at least dt");
  const double scale = std::max(1.0, x0.cwiseAbs().maxCoeff());
  if ((x_tg - x0).cwiseAbs().maxCoeff() <= 1e-12 * scale) return 0.0;

  Stepper st(A, input_set, x0, dt, generator_cap);
  const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
  for (long i = 1; i <= steps; ++i) {
    st.advance();
    // Cheap rejections before the membership program.
    const Vector d = x_tg - st.center();
    const Vector rad = st.generators().cwiseAbs().rowwise().sum();
    if (((d.cwiseAbs() - rad).array() > 1e-9 * (1.0 + rad.array())).any()) continue;
    if (d.squaredNorm() > (d.transpose() * st.generators()).cwiseAbs().sum() * (1.0 + 1e-9) + 1e-18) continue;
    if (contains_point(st.current(), x_tg, 1e-9)) return static_cast<double>(i) * dt;
  }
  return std::nullopt;
}

std::optional<double> min_time_upper_bound(const Matrix& A, const ZSet& zset, const Vector& x0, const Vector& x_tg,
                                           double dt, double t_max, long generator_cap) {
  return min_time_upper_bound(A, require_nonempty(zset), x0, x_tg, dt, t_max, generator_cap);
}

std::optional<double> nominal_time_oracle(const LinearSystem& sys, const Vector& x0, const Vector& x_tg, double dt,
                                          double t_max, long generator_cap) {
  const Zonotope full(Vector::Zero(sys.A.rows()), sys.B_bar);
  return min_time_upper_bound(sys.A, full, x0, x_tg, dt, t_max, generator_cap);
}

std::optional<double> malfunction_time_oracle(const LinearSystem& sys, const ControlSplit& split, const Vector& x0,
                                              const Vector& x_tg, double dt, double t_max, long generator_cap) {
  const ZSet z = compute_z_set(split);
  if (z.empty()) throw PreconditionError("malfunction_time_oracle: Z is empty, the target cannot be guaranteed");
  return min_time_upper_bound(sys.A, z, x0, x_tg, dt, t_max, generator_cap);
}

}  // namespace reskit
