#include <doctest.h>

#include "helpers.hpp"
#include "reskit/errors.hpp"
#include "reskit/quantitative.hpp"
#include "reskit/reachability.hpp"
#include "reskit/scenarios.hpp"

using namespace reskit;
using testutil::Rng;

namespace {

// min over unit directions of h(d) / ||d||_{P^-1}: the P-norm inradius of a
// centred set, approached from above by dense direction sampling in 2-D.
double direction_inradius(const Matrix& P, const Zonotope& Z, int samples = 200000) {
  const Matrix Pi = P.inverse();
  double best = INFINITY;
  for (int k = 0; k < samples; ++k) {
    const double th = M_PI * k / samples;
    Vector d(2);
    d << std::cos(th), std::sin(th);
    best = std::min(best, support(Z, d) / std::sqrt(d.dot(Pi * d)));
  }
  return best;
}

// In the plane the facet normals are the generators turned by 90 degrees; the
// ratio has a kink there, so sampling alone is off by O(1/samples).
double facet_inradius(const Matrix& P, const Zonotope& Z) {
  const Matrix Pi = P.inverse();
  double best = INFINITY;
  for (Eigen::Index j = 0; j < Z.order(); ++j) {
    Vector d(2);
    d << -Z.generators()(1, j), Z.generators()(0, j);
    if (d.norm() == 0) continue;
    best = std::min(best, support(Z, d) / std::sqrt(d.dot(Pi * d)));
  }
  return best;
}

double brute_max_pnorm(const Matrix& P, const Zonotope& Z) {
  double best = 0;
  for (const auto& v : testutil::sign_points(Z)) best = std::max(best, std::sqrt(v.dot(P * v)));
  return best;
}

LinearSystem make_system(const Matrix& A, const Matrix& B_bar) {
  LinearSystem s;
  s.A = A;
  s.B_bar = B_bar;
  s.validate();
  return s;
}

}  // namespace

TEST_SUITE("quantitative") {

TEST_CASE("b_max") {
  CHECK(b_max(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
  Matrix P(2, 2);
  P << 4, 0, 0, 1;
  CHECK(b_max(P, Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(5.0)));
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix Bb = rng.gaussian(3, 4);
    const Matrix Pr = rng.spd(3);
    CHECK(b_max(Pr, Bb) == doctest::Approx(brute_max_pnorm(Pr, Zonotope(Vector::Zero(3), Bb))).epsilon(1e-12));
  }
  try {
    b_max(Matrix::Identity(2, 2), rng.gaussian(2, 22));
    FAIL("cap not enforced");
  } catch (const CapacityError& e) {
    CHECK(e.partial > 0);
  }
}

TEST_CASE("b_min is the inradius of the input image") {
  CHECK(b_min(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == doctest::Approx(1.0));
  Matrix D(2, 2);
  D << 2, 0, 0, 1;
  CHECK(b_min(Matrix::Identity(2, 2), D) == doctest::Approx(1.0));
  Rng rng(52);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix Bb = rng.gaussian(2, 3);
    const Matrix P = rng.spd(2);
    const Zonotope Z(Vector::Zero(2), Bb);
    const double got = b_min(P, Bb);
    CHECK(got == doctest::Approx(facet_inradius(P, Z)).epsilon(1e-9));
    const double sampled = direction_inradius(P, Z);
    CHECK(got <= sampled + 1e-12);
    CHECK(got >= sampled * (1 - 1e-4));
  }
  CHECK(b_min(Matrix::Identity(2, 2), Vector::Unit(2, 0)) == 0.0);
}

TEST_CASE("z_max") {
  CHECK(z_max(Matrix::Identity(2, 2), Zonotope::box(2)) == doctest::Approx(std::sqrt(2.0)));
  Rng rng(53);
  const Matrix P = rng.spd(3);
  const Vector g = rng.gaussian(3);
  CHECK(z_max(P, Zonotope(Vector::Zero(3), g)) == doctest::Approx(std::sqrt(g.dot(P * g))));
  for (int trial = 0; trial < 10; ++trial) {
    const Zonotope Z = testutil::random_centred(rng, 3, rng.integer(1, 10));
    const Matrix Pr = rng.spd(3);
    CHECK(z_max(Pr, Z) == doctest::Approx(brute_max_pnorm(Pr, Z)).epsilon(1e-12));
  }
}

TEST_CASE("z_min") {
  CHECK(z_min(Matrix::Identity(2, 2), Zonotope::box(2)) == doctest::Approx(1.0));
  Matrix G(2, 2);
  G << 2, 0, 0, 1;
  CHECK(z_min(Matrix::Identity(2, 2), Zonotope(Vector::Zero(2), G)) == doctest::Approx(1.0));
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const Zonotope Z = testutil::random_centred(rng, 2, rng.integer(2, 5));
    const Matrix P = rng.spd(2);
    const double got = z_min(P, Z);
    CHECK(got == doctest::Approx(facet_inradius(P, Z)).epsilon(1e-9));
    const double sampled = direction_inradius(P, Z);
    CHECK(got <= sampled + 1e-12);
    CHECK(got >= sampled * (1 - 1e-4));
  }
  CHECK_THROWS_AS(z_min(Matrix::Identity(2, 2), Zonotope(Vector::Zero(2), Vector::Unit(2, 0))), RankError);
  CHECK_THROWS_AS(z_min(Matrix::Identity(2, 2), Zonotope(Vector::Ones(2), Matrix::Identity(2, 2))),
                  PreconditionError);
}

TEST_CASE("ellipsoid fit") {
  const Matrix Pu = ellipsoid_fit_P(Zonotope::box(2));
  CHECK((Pu - Matrix::Identity(2, 2)).norm() < 1e-4);

  Matrix G(2, 2);
  G << 2, 0, 0, 1;
  const Matrix Pb = ellipsoid_fit_P(Zonotope(Vector::Zero(2), G));
  CHECK(Pb(0, 0) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(Pb(1, 1) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(Pb(0, 1)) < 1e-4);

  // inscribed, and no worse in area than a dense search over ellipses
  const Zonotope hex(Vector::Zero(2), (Matrix(2, 3) << 1, 0, 1, 0, 1, 1).finished());
  const Matrix Ph = ellipsoid_fit_P(hex);
  CHECK(z_min(Ph, hex) >= 1.0 - 1e-6);
  const HPolytope H = facets(hex);
  double best_area = 0;
  for (int i = 0; i < 180; ++i) {
    const double th = M_PI * i / 180;
    Eigen::Matrix2d R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    for (int j = 1; j <= 200; ++j) {
      const double ratio = 0.05 * j;  // axis ratio
      // largest scale s with ellipse axes (s, s*ratio) inside every facet
      double s = INFINITY;
      for (Eigen::Index k = 0; k < H.size(); ++k) {
        const Eigen::Vector2d m = R.transpose() * H.normals.row(k).transpose();
        s = std::min(s, H.offsets(k) / std::hypot(m(0), ratio * m(1)));
      }
      best_area = std::max(best_area, M_PI * s * s * ratio);
    }
  }
  const double area = M_PI / std::sqrt(Ph.determinant());
  CHECK(area >= 0.98 * best_area);
}

TEST_CASE("pairs satisfy the norm ordering") {
  const Scenario temp = temperature_scenario();
  const ControlSplit sp = split_system(temp.system, {3});
  const ZSet z = compute_z_set(sp);
  const auto pairs = sample_pairs(temp.system.A, {temp.system.B_bar, z.inner}, 50, 7);
  for (const auto& p : pairs) {
    CHECK((temp.system.A.transpose() * p.P + p.P * temp.system.A + p.Q).norm() <= 1e-8 * p.Q.norm());
    CHECK(p.z_min <= p.z_max);
    CHECK(p.z_max <= p.b_max);
    CHECK(p.b_min <= p.b_max);
    CHECK(p.lam_min_P <= p.lam_max_P);
    CHECK(p.lam_min_Q <= p.lam_max_Q);
  }
}

TEST_CASE("sampling is deterministic and thread-count independent") {
  const Scenario temp = temperature_scenario();
  const NormGeometry g{temp.system.B_bar, std::nullopt};
  const auto a = sample_pairs(temp.system.A, g, 1, 99);
  const auto b = sample_pairs(temp.system.A, g, 1, 99);
  CHECK(a[0].b_max == b[0].b_max);
  CHECK((a[0].P - b[0].P).norm() == 0.0);
  const auto c = sample_pairs(temp.system.A, g, 40, 3, 1);
  const auto d = sample_pairs(temp.system.A, g, 40, 3, 4);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK((c[i].P - d[i].P).norm() == 0.0);
  CHECK((sample_Q(3, 5, 0) - sample_Q(3, 5, 1)).norm() > 0);
  CHECK_THROWS_AS(sample_pairs(Matrix::Identity(2, 2), g, 1, 0), PreconditionError);
}

TEST_CASE("scalar reach-time bounds are exact") {
  const Matrix A = -Matrix::Identity(1, 1);
  const LyapunovPair p = make_pair(A, Matrix::Identity(1, 1), {Matrix::Identity(1, 1), std::nullopt}, "q1");
  CHECK(p.P(0, 0) == doctest::Approx(0.5));
  for (double x0 : {0.1, 0.5, 2.0}) {
    const TimeBounds tb = reach_time_bounds(p, Vector::Constant(1, x0));
    CHECK(tb.T_N.lo == doctest::Approx(std::log(1 + x0)).epsilon(1e-12));
    CHECK(tb.T_N.hi == doctest::Approx(std::log(1 + x0)).epsilon(1e-12));
  }
  const TimeBounds zero = reach_time_bounds(p, Vector::Zero(1));
  CHECK(zero.T_N.lo == 0.0);
  CHECK(zero.T_N.hi == 0.0);
}

TEST_CASE("bounds are invariant under scaling the pair") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 3);
    const Matrix A = rng.hurwitz(n);
    const Matrix Bb = rng.gaussian(n, n + 1);
    const Zonotope Z = linear_map(0.3 * Matrix::Identity(n, n), Zonotope(Vector::Zero(n), Bb));
    const NormGeometry g{Bb, Z};
    const LyapunovPair p = make_pair(A, rng.spd(n), g, "p");
    const double s = std::exp(rng.uniform(-3, 3));
    const LyapunovPair q = pair_from_P(A, s * p.P, g, "sp");
    const Vector x0 = rng.gaussian(n);
    const TimeBounds a = reach_time_bounds(p, x0), b = reach_time_bounds(q, x0);
    CHECK(std::abs(a.T_N.lo - b.T_N.lo) <= 1e-12 * std::max(1.0, a.T_N.lo));
    CHECK(std::abs(a.T_N.hi - b.T_N.hi) <= 1e-12 * std::max(1.0, a.T_N.hi));
    CHECK(std::abs(a.T_M.lo - b.T_M.lo) <= 1e-12 * std::max(1.0, a.T_M.lo));
    CHECK(std::abs(a.T_M.hi - b.T_M.hi) <= 1e-12 * std::max(1.0, a.T_M.hi));
    const RqBounds ra = rq_bounds(p), rb = rq_bounds(q);
    CHECK(std::abs(ra.lower - rb.lower) <= 1e-12);
    CHECK(std::abs(ra.upper - rb.upper) <= 1e-12);
  }
}

TEST_CASE("bounds grow with the initial distance") {
  Rng rng(56);
  const Matrix A = rng.hurwitz(3);
  const Matrix Bb = rng.gaussian(3, 4);
  const NormGeometry g{Bb, linear_map(0.2 * Matrix::Identity(3, 3), Zonotope(Vector::Zero(3), Bb))};
  const LyapunovPair p = make_pair(A, rng.spd(3), g, "p");
  const Vector dir = rng.gaussian(3);
  TimeBounds prev = reach_time_bounds(p, 0.01 * dir);
  for (double s : {0.1, 1.0, 10.0, 100.0}) {
    const TimeBounds tb = reach_time_bounds(p, s * dir);
    CHECK(tb.T_N.lo > prev.T_N.lo);
    CHECK(tb.T_N.hi > prev.T_N.hi);
    CHECK(tb.T_M.lo > prev.T_M.lo);
    CHECK(tb.T_M.hi > prev.T_M.hi);
    prev = tb;
  }
}

TEST_CASE("open endpoints follow the hypotheses") {
  const LyapunovPair p = make_pair(-Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                   {Vector::Unit(2, 0), std::nullopt}, "flat");
  BoundHypotheses h;
  h.full_rank_B = false;
  h.resiliently_stabilizable = false;
  h.z_interior = false;
  const TimeBounds tb = reach_time_bounds(p, Vector::Ones(2), h);
  CHECK(std::isinf(tb.T_N.hi));
  CHECK(tb.T_M.lo == 0.0);
  CHECK(std::isinf(tb.T_M.hi));
  CHECK(tb.flags.size() == 3);
  const RqBounds rq = rq_bounds(p, h);
  CHECK(rq.lower == 0.0);
  CHECK(rq.upper == 1.0);
}

TEST_CASE("r_q lower bound takes the smaller limiting ratio") {
  // x' = -x + u + w, |u|, |w| <= 1 with w scaled by 0.9: Z = [-0.1, 0.1]
  const LinearSystem s = make_system(-Matrix::Identity(1, 1), (Matrix(1, 2) << 1, 0.9).finished());
  const ControlSplit sp = split_system(s, {1});
  const ZSet z = compute_z_set(sp);
  REQUIRE_FALSE(z.empty());
  const LyapunovPair p = make_pair(s.A, Matrix::Identity(1, 1), {s.B_bar, z.inner}, "q");
  const RqBounds rq = rq_bounds(p);
  // bang-bang times: T_N = ln(1 + x/1.9), T_M = ln(1 + x/0.1); the ratio decreases to 0.1/1.9 as x -> 0
  double inf_ratio = 1.0;
  for (double x = 1e-6; x < 1e6; x *= 1.5) inf_ratio = std::min(inf_ratio, std::log1p(x / 1.9) / std::log1p(x / 0.1));
  CHECK(inf_ratio == doctest::Approx(0.1 / 1.9).epsilon(1e-4));
  CHECK(rq.lower <= inf_ratio + 1e-12);
  CHECK(rq.lower == doctest::Approx(0.1 / 1.9));
  CHECK(rq.lower_max_form > inf_ratio);  // the larger ratio would not be a valid lower bound
  CHECK(rq.upper <= 1.0);
  CHECK(rq.upper >= 0.1 / 1.9 - 1e-12);  // the infimum itself is the x -> 0 limit
}

TEST_CASE("reach-time bounds sandwich the oracle times") {
  Rng rng(57);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 8; ++trial) {
    const int n = rng.integer(1, 3);
    const Matrix A = rng.hurwitz(n, 0.3);
    Matrix Bb(n, n + 1);
    Bb << rng.gaussian(n, n) + 2.0 * Matrix::Identity(n, n), 0.2 * rng.gaussian(n, 1);
    const LinearSystem s = make_system(A, Bb);
    const ControlSplit sp = split_system(s, {n});
    const ZSet z = compute_z_set(sp);
    if (z.empty() || *z.affine_dim < n) continue;
    const Vector x0 = rng.gaussian(n);
    const double dt = 0.02;
    const auto tn = nominal_time_oracle(s, x0, Vector::Zero(n), dt, 40.0);
    const auto tm = malfunction_time_oracle(s, sp, x0, Vector::Zero(n), dt, 40.0);
    if (!tn || !tm) continue;
    const auto pairs = sample_pairs(A, {Bb, z.inner}, 20, trial);
    for (const auto& p : pairs) {
      const TimeBounds tb = reach_time_bounds(p, x0);
      CHECK(tb.T_N.lo <= *tn + dt);
      CHECK(tb.T_N.hi >= *tn - dt);
      CHECK(*tm - dt <= tb.T_M.hi);
      CHECK(tb.T_M.lo <= *tm + dt);
      const RqBounds rq = rq_bounds(p);
      // equal in one dimension up to rounding
      CHECK(rq.lower <= rq.upper * (1 + 1e-12));
    }
    ++done;
  }
  CHECK(done >= 4);
}

TEST_CASE("temperature bounds") {
  const Scenario temp = temperature_scenario();
  const ControlSplit sp = split_system(temp.system, {3});
  BoundsOptions opt;
  opt.samples = 200;
  const BoundsReport r = compute_bounds(temp.system, sp, temp.default_x0, opt);
  CHECK(r.best.pairs == 202);
  REQUIRE(r.sources.size() == 3);
  CHECK(r.sources[0].source == "stochastic");
  CHECK(r.sources[1].source == "ellipsoid");
  CHECK(r.sources[2].source == "identity");
  CHECK(r.best.T_N.lo <= 42.5);
  CHECK(r.best.T_N.hi >= 42.5);
  CHECK(r.best.T_M.lo <= 113.5);
  CHECK(r.best.T_M.hi >= 113.5);
  CHECK(r.best.rq_lower <= r.best.rq_upper);
  CHECK(r.best.rq_upper <= 1.0);
  // the fitted ellipsoid gives the tighter T_M upper endpoint
  CHECK(r.sources[1].T_M.hi < r.sources[0].T_M.hi);

  const BoundsReport zero = compute_bounds(temp.system, sp, Vector::Zero(3), opt);
  CHECK(zero.best.T_N.lo == 0.0);
  CHECK(zero.best.T_N.hi == 0.0);
  CHECK(zero.best.T_M.lo == 0.0);
  CHECK(zero.best.T_M.hi == 0.0);

  const BoundsReport again = compute_bounds(temp.system, sp, temp.default_x0, opt);
  CHECK(again.best.T_M.hi == r.best.T_M.hi);
  CHECK(again.best.T_M_upper_id == r.best.T_M_upper_id);

  const Scenario adm = admire_scenario();
  CHECK_THROWS_AS(compute_bounds(adm.system, split_system(adm.system, {2}), Vector::Zero(9)), PreconditionError);
}

}  // TEST_SUITE
