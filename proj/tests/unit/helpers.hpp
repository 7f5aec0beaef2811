#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "reskit/linalg.hpp"
#include "reskit/zonotope.hpp"

namespace testutil {

using reskit::Matrix;
using reskit::Vector;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Matrix gaussian(Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) M(i, j) = normal();
    return M;
  }
  Vector gaussian(Eigen::Index n) { return gaussian(n, 1).col(0); }
  Vector cube(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform();
    return v;
  }
  // Hurwitz by shifting the spectrum left of -margin.
  Matrix hurwitz(Eigen::Index n, double margin = 0.2) {
    Matrix A = gaussian(n, n);
    const double shift = Eigen::EigenSolver<Matrix>(A).eigenvalues().real().maxCoeff();
    return A - (shift + margin + uniform(0.0, 1.0)) * Matrix::Identity(n, n);
  }
  Matrix spd(Eigen::Index n) {
    Matrix G = gaussian(n, n);
    return G.transpose() * G + 0.1 * Matrix::Identity(n, n);
  }
};

// All c + G s over sign vectors s; no deduplication.
inline std::vector<Vector> sign_points(const reskit::Zonotope& Z) {
  const auto q = Z.order();
  std::vector<Vector> out;
  for (long mask = 0; mask < (1L << q); ++mask) {
    Vector x = Z.center();
    for (Eigen::Index i = 0; i < q; ++i) x += ((mask >> i) & 1 ? 1.0 : -1.0) * Z.generators().col(i);
    out.push_back(x);
  }
  return out;
}

inline double brute_support(const reskit::Zonotope& Z, const Vector& d) {
  double best = -INFINITY;
  for (const auto& v : sign_points(Z)) best = std::max(best, d.dot(v));
  return best;
}

// Point of Z from a coefficient vector in [-1,1]^q.
inline Vector point_of(const reskit::Zonotope& Z, const Vector& alpha) { return Z.center() + Z.generators() * alpha; }

// Classic fourth-order Runge-Kutta on x' = A x + u with constant u.
inline Vector rk4(const Matrix& A, const Vector& u, Vector x, double T, int steps) {
  const double h = T / steps;
  auto f = [&](const Vector& y) -> Vector { return A * y + u; };
  for (int k = 0; k < steps; ++k) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

// Composite Simpson with Richardson extrapolation on a vector-valued integrand.
inline Vector richardson_simpson(const std::function<Vector(double)>& f, double a, double b, int panels = 64) {
  auto simpson = [&](int m) {
    const double h = (b - a) / (2 * m);
    Vector s = f(a) + f(b);
    for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return Vector(s * h / 3.0);
  };
  const Vector coarse = simpson(panels);
  const Vector fine = simpson(2 * panels);
  return fine + (fine - coarse) / 15.0;
}

// Random centred zonotope in R^n with q generators.
inline reskit::Zonotope random_centred(Rng& rng, Eigen::Index n, Eigen::Index q) {
  return reskit::Zonotope(Vector::Zero(n), rng.gaussian(n, q));
}

}  // namespace testutil
