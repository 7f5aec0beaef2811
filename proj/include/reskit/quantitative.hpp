#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reskit/resilience.hpp"
#include "reskit/zonotope.hpp"

namespace reskit {

// P-norm extrema over the full input set and over Z.
double b_max(const Matrix& P, const Matrix& B_bar, int gen_cap = default_vertex_cap);
// P-norm inradius of B_bar U_bar; 0 when B_bar does not have full row rank.
double b_min(const Matrix& P, const Matrix& B_bar, long facet_cap = default_facet_cap);
double z_max(const Matrix& P, const Zonotope& Z, int gen_cap = default_vertex_cap);
double z_min(const Matrix& P, const Zonotope& Z, long facet_cap = default_facet_cap);

// Largest-volume centred ellipsoid {x : x^T P x <= 1} inside a full-dimensional
// centred zonotope.
Matrix ellipsoid_fit_P(const Zonotope& Z, long facet_cap = default_facet_cap);

// What the bounds are computed against.
struct NormGeometry {
  Matrix B_bar;
  MaybeZonotope Z;  // inner approximation of the control-deficit set
};

struct LyapunovPair {
  Matrix P;
  Matrix Q;
  double lam_min_P = 0, lam_max_P = 0, lam_min_Q = 0, lam_max_Q = 0;
  double b_max = 0, b_min = 0, z_max = 0, z_min = 0;
  bool has_z = false;       // z_max available (Z nonempty)
  bool z_interior = false;  // z_min available (Z full-dimensional)
  std::string source;
};

// Pair from A and Q (P solved from the Lyapunov equation).
LyapunovPair make_pair(const Matrix& A, const Matrix& Q, const NormGeometry& geom, std::string source);
// Pair from a given P; Q = -(A^T P + P A) must be positive definite.
LyapunovPair pair_from_P(const Matrix& A, const Matrix& P, const NormGeometry& geom, std::string source);

std::vector<LyapunovPair> sample_pairs(const Matrix& A, const NormGeometry& geom, int count, std::uint64_t seed,
                                       int threads = 1);

// Random symmetric positive definite Q for sample `index`; depends only on (seed, index).
Matrix sample_Q(Eigen::Index n, std::uint64_t seed, std::uint64_t index);

struct BoundHypotheses {
  bool full_rank_B = true;               // rank(B_bar) = n
  bool resiliently_stabilizable = true;  // required by the T_M lower bound
  bool z_interior = true;                // int(Z) nonempty
};

struct TimeBounds {
  Interval T_N{0.0, 0.0};
  Interval T_M{0.0, 0.0};
  std::vector<std::string> flags;  // open endpoints and why
};

TimeBounds reach_time_bounds(const LyapunovPair& pair, const Vector& x0, const BoundHypotheses& hyp = {});

// Both endpoints take the smaller of the two limiting ratios of the time bounds
// (x0 -> 0 and x0 -> infinity); the ratio of the log forms is monotone in
// ||x0||_P so its infimum is attained at one of the two ends.
struct RqBounds {
  double lower = 0.0;           // min(eigen-ratio term, z_min/b_max)
  double lower_max_form = 0.0;  // max of the same two terms; diagnostic only, not a valid bound
  double upper = 1.0;           // min(inverse eigen-ratio term, z_max/b_min), clamped to 1
  bool clamped = false;
  std::vector<std::string> flags;
};

RqBounds rq_bounds(const LyapunovPair& pair, const BoundHypotheses& hyp = {});

struct BoundsOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  bool ellipsoid = true;
  bool identity = true;  // add P = I when A + A^T is negative definite
  Tolerances tol;
};

// Best endpoints over a group of pairs, with the pair that produced each one.
struct BoundsSummary {
  std::string source;  // "all", "stochastic", "ellipsoid" or "identity"
  int pairs = 0;
  Interval T_N{0.0, 0.0};
  Interval T_M{0.0, 0.0};
  double rq_lower = 0.0;
  double rq_upper = 1.0;
  double rq_lower_max_form = 0.0;
  bool rq_clamped = false;  // every pair's upper exceeded 1
  std::string T_N_lower_id, T_N_upper_id, T_M_lower_id, T_M_upper_id, rq_lower_id, rq_upper_id;

  void absorb(const LyapunovPair& pair, const TimeBounds& tb, const RqBounds& rq);
};

struct BoundsReport {
  Vector x0;
  BoundHypotheses hypotheses;
  BoundsSummary best;                  // over every pair
  std::vector<BoundsSummary> sources;  // one per pair source that was evaluated
  std::vector<std::string> flags;      // open endpoints
  std::vector<std::string> notes;
};

// Best intervals over sampled pairs plus the ellipsoid-fit and identity pairs. Throws
// PreconditionError when A is not Hurwitz.
BoundsReport compute_bounds(const LinearSystem& sys, const ControlSplit& split, const Vector& x0,
                            const BoundsOptions& opt = {});

}  // namespace reskit
