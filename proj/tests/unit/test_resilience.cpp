#include <doctest.h>

#include "helpers.hpp"
#include "reskit/errors.hpp"
#include "reskit/resilience.hpp"
#include "reskit/scenarios.hpp"

using namespace reskit;
using testutil::Rng;

namespace {

LinearSystem make_system(const Matrix& A, const Matrix& B_bar) {
  LinearSystem s;
  s.A = A;
  s.B_bar = B_bar;
  s.validate();
  return s;
}

LinearSystem double_integrator_with_I2() {
  Matrix A(2, 2);
  A << 0, 1, 0, 0;
  Matrix Bb(2, 3);
  Bb << 1, 0, 0.5, 0, 1, 0;
  return make_system(A, Bb);
}

LinearSystem random_system(Rng& rng, int n, int cols) {
  Matrix A = rng.gaussian(n, n);
  switch (rng.integer(0, 3)) {
    case 0: A = A - A.transpose(); break;                       // imaginary spectrum
    case 1: A = rng.hurwitz(n); break;                          // strictly stable
    case 2: A.setZero(); if (n > 1) A(0, 1) = 1.0; break;       // nilpotent
    default: break;
  }
  return make_system(A, rng.gaussian(n, cols));
}

}  // namespace

TEST_SUITE("resilience") {

TEST_CASE("split system") {
  const LinearSystem s = make_system(Matrix::Zero(2, 2), (Matrix(2, 3) << 1, 2, 3, 4, 5, 6).finished());
  const ControlSplit a = split_system(s, {2});
  CHECK(a.B.cols() == 2);
  CHECK(a.B(0, 1) == 2.0);
  CHECK(a.C(1, 0) == 6.0);
  CHECK(a.controlled == std::vector<int>{0, 1});

  const LinearSystem s4 = make_system(Matrix::Zero(1, 1), (Matrix(1, 4) << 1, 2, 3, 4).finished());
  const ControlSplit b = split_system(s4, {1, 0});
  CHECK(b.lost == std::vector<int>{0, 1});
  CHECK(b.B(0, 0) == 3.0);
  CHECK(b.B(0, 1) == 4.0);
  CHECK(b.C(0, 0) == 1.0);
  CHECK(b.C(0, 1) == 2.0);

  CHECK_THROWS_AS(split_system(s, {}), ArgumentError);
  CHECK_THROWS_AS(split_system(s, {0, 1, 2}), ArgumentError);
  CHECK_THROWS_AS(split_system(s, {3}), ArgumentError);
  CHECK_THROWS_AS(split_system(s, {1, 1}), ArgumentError);

  const LinearSystem adm = admire_scenario().system;
  const ControlSplit yaw = split_system(adm, {8});
  CHECK(adm.actuator_labels[8] == "yaw_thrust_vectoring");
  CHECK((yaw.C.col(0) - adm.B_bar.col(8)).norm() == 0.0);
}

TEST_CASE("Z for axis-aligned splits") {
  Matrix Bb(2, 3);
  Bb << 1, 0, 0.5, 0, 1, 0;
  const LinearSystem s = make_system(Matrix::Zero(2, 2), Bb);
  const ZSet z = compute_z_set(split_system(s, {2}));
  REQUIRE_FALSE(z.empty());
  CHECK(*z.affine_dim == 2);
  CHECK(support(*z.inner, Vector::Unit(2, 0)) == doctest::Approx(0.5));
  CHECK(support(*z.inner, Vector::Unit(2, 1)) == doctest::Approx(1.0));
  CHECK(support(*z.inner, Vector::Ones(2)) == doctest::Approx(1.5));

  const LinearSystem e = make_system(Matrix::Zero(2, 2), Matrix::Identity(2, 2));
  const ZSet none = compute_z_set(split_system(e, {1}));
  CHECK(none.empty());
  CHECK_FALSE(none.affine_dim.has_value());
}

TEST_CASE("admire Z for the first eight actuators") {
  const LinearSystem adm = admire_scenario().system;
  for (int k = 0; k < 10; ++k) {
    const ZSet z = compute_z_set(split_system(adm, {k}));
    CHECK(z.empty() == (k >= 8));
    if (!z.empty()) {
      // the last three rows of B_bar vanish, so Z lives in a 6-dimensional span
      CHECK(*z.affine_dim == 6);
      CHECK(numerical_rank(split_system(adm, {k}).B) == 6);
    }
  }
}

TEST_CASE("Z stays inside BU and is symmetric") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 3);
    const LinearSystem s = make_system(rng.gaussian(n, n), rng.gaussian(n, n + 2));
    const ControlSplit sp = split_system(s, {rng.integer(0, n + 1)});
    const ZSet z = compute_z_set(sp);
    if (z.empty()) continue;
    CHECK(z.inner->center().norm() == 0.0);
    CHECK(contains_zonotope(Zonotope(Vector::Zero(n), sp.B), *z.inner, ContainmentMode::exact, 1e-7));
    for (int k = 0; k < 10; ++k) {
      const Vector v = rng.gaussian(n);
      CHECK(support(*z.inner, v) == doctest::Approx(support(*z.inner, Vector(-v))).epsilon(1e-12));
    }
  }
}

TEST_CASE("Z is empty exactly when CW escapes BU") {
  Rng rng(32);
  int empties = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.integer(1, 3);
    const LinearSystem s = make_system(rng.gaussian(n, n), rng.gaussian(n, rng.integer(2, n + 3)));
    const ControlSplit sp = split_system(s, {0});
    const bool inside = contains_zonotope(Zonotope(Vector::Zero(n), sp.B), Zonotope(Vector::Zero(n), sp.C),
                                          ContainmentMode::exact);
    const ZSet z = compute_z_set(sp);
    CHECK(z.empty() == !inside);
    empties += z.empty();
  }
  CHECK(empties > 0);
}

TEST_CASE("eigenvector condition") {
  // full-dimensional Z: always holds
  Rng rng(33);
  ZSet full;
  full.inner = Zonotope::box(3);
  full.affine_dim = 3;
  full.basis = Matrix::Identity(3, 3);
  for (int k = 0; k < 10; ++k) CHECK(eigenvector_condition(eigen_spectrum(rng.gaussian(3, 3)), full));

  Matrix A(2, 2);
  A << -1, 0, 0, -2;
  ZSet seg;
  seg.inner = Zonotope(Vector::Zero(2), Vector::Unit(2, 1));
  seg.affine_dim = 1;
  seg.basis = Vector::Unit(2, 1);
  CHECK_FALSE(eigenvector_condition(eigen_spectrum(A), seg));

  Matrix R(2, 2);
  R << 0, 1, -1, 0;
  CHECK(eigenvector_condition(eigen_spectrum(R), seg));

  ZSet empty;
  CHECK_THROWS_AS(eigenvector_condition(eigen_spectrum(A), empty), PreconditionError);
}

TEST_CASE("eigenvector condition agrees with the raw inequality") {
  Rng rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(2, 3);
    Matrix A = rng.gaussian(n, n);
    A = A + A.transpose();  // real spectrum
    const Matrix gens = rng.gaussian(n, 1);
    ZSet z;
    z.inner = Zonotope(Vector::Zero(n), gens);
    z.affine_dim = 1;
    z.basis = gens.normalized();
    // nudge the segment onto an eigenvector half of the time
    const Spectrum spec = eigen_spectrum(A);
    if (trial % 2 == 0) {
      Vector w = spec.real_eigenvectors.front().vector;
      Vector perp = rng.gaussian(n);
      perp -= w.dot(perp) * w;
      z.inner = Zonotope(Vector::Zero(n), perp);
      z.basis = perp.normalized();
    }
    bool raw = true;
    for (const auto& ev : spec.real_eigenvectors) {
      // exists v with v^T z <= 0 for every z in Z
      const bool all_nonpos = support(*z.inner, ev.vector) <= 1e-9;
      const bool all_nonpos_neg = support(*z.inner, Vector(-ev.vector)) <= 1e-9;
      if (all_nonpos || all_nonpos_neg) raw = false;
    }
    CHECK(eigenvector_condition(spec, z) == raw);
  }
}

TEST_CASE("case-study verdicts") {
  const Scenario temp = temperature_scenario();
  for (int k = 0; k < 7; ++k) {
    const ResilienceVerdict v = analyze_resilience(temp.system, split_system(temp.system, {k}));
    CHECK(v.resiliently_stabilizable);
    CHECK_FALSE(v.resilient);
    CHECK(v.spectrum == SpectrumClass::strictly_negative);
  }
  const Scenario adm = admire_scenario();
  for (int k = 0; k < 10; ++k) {
    const ResilienceVerdict v = check_resilient_stabilizability(adm.system, split_system(adm.system, {k}));
    CHECK_FALSE(v.resiliently_stabilizable);
    CHECK_FALSE(v.resilient);
    CHECK(v.spectrum == SpectrumClass::violated);
    if (k >= 8) CHECK(v.z_empty);
  }
}

TEST_CASE("double integrator is resilient") {
  const LinearSystem s = double_integrator_with_I2();
  const ResilienceVerdict v = check_resilience(s, split_system(s, {2}));
  CHECK(v.resilient);
  CHECK(v.resiliently_stabilizable);
  CHECK(*v.z_dim == 2);
  CHECK(v.diagnostics.controllability_rank == 2);
  CHECK(v.spectrum == SpectrumClass::imaginary_axis);

  const Scenario di = double_integrator_scenario();
  const ResilienceVerdict w = check_resilience(di.system, split_system(di.system, {1}));
  CHECK(w.resilient);
  CHECK(*w.z_dim == 1);
}

TEST_CASE("empty Z makes both verdicts false") {
  const LinearSystem e = make_system(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  const ResilienceVerdict v = analyze_resilience(e, split_system(e, {1}));
  CHECK(v.z_empty);
  CHECK_FALSE(v.resilient);
  CHECK_FALSE(v.resiliently_stabilizable);
  CHECK_FALSE(v.z_dim.has_value());
}

TEST_CASE("spectrum classes") {
  Tolerances t;
  CHECK(classify_spectrum(eigen_spectrum(-Matrix::Identity(2, 2)), t.spectrum) == SpectrumClass::strictly_negative);
  Matrix R(2, 2);
  R << 0, 1, -1, 0;
  CHECK(classify_spectrum(eigen_spectrum(R), t.spectrum) == SpectrumClass::imaginary_axis);
  Matrix M(2, 2);
  M << 0, 0, 0, -1;
  CHECK(classify_spectrum(eigen_spectrum(M), t.spectrum) == SpectrumClass::nonpositive);
  CHECK(classify_spectrum(eigen_spectrum(Matrix::Identity(2, 2)), t.spectrum) == SpectrumClass::violated);
  CHECK(std::string(to_string(SpectrumClass::imaginary_axis)) == "zero-ok");
}

TEST_CASE("nominal checks") {
  const LinearSystem s = make_system(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(check_nominal(s, NominalMode::stabilizable));
  CHECK_FALSE(check_nominal(s, NominalMode::controllable));
  Matrix A(2, 2);
  A << 0, 1, 0, 0;
  const LinearSystem di = make_system(A, Vector::Unit(2, 1));
  CHECK(check_nominal(di, NominalMode::controllable));
  CHECK(check_nominal(temperature_scenario().system, NominalMode::stabilizable));
}

TEST_CASE("corollary equivalences on random instances") {
  Rng rng(35);
  int used = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.integer(1, 3);
    const LinearSystem s = random_system(rng, n, rng.integer(n + 1, n + 3));
    const ControlSplit sp = split_system(s, {0});
    const ResilienceVerdict v = analyze_resilience(s, sp);
    if (!v.dim_equals_rankB) continue;
    ++used;
    CHECK(v.resiliently_stabilizable == check_nominal(s, NominalMode::stabilizable));
    CHECK(v.resilient == check_nominal(s, NominalMode::controllable));
  }
  CHECK(used > 50);
}

TEST_CASE("losing more actuators never helps") {
  Rng rng(36);
  int pairs = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = rng.integer(1, 3);
    const LinearSystem s = random_system(rng, n, n + 3);
    const ResilienceVerdict small = analyze_resilience(s, split_system(s, {0}));
    const ResilienceVerdict big = analyze_resilience(s, split_system(s, {0, 1}));
    if (big.resiliently_stabilizable) CHECK(small.resiliently_stabilizable);
    if (big.resilient) CHECK(small.resilient);
    pairs += big.resiliently_stabilizable;
  }
  CHECK(pairs > 5);
}

}  // TEST_SUITE
