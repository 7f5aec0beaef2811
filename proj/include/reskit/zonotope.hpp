#pragma once

#include <optional>
#include <vector>

#include "reskit/linalg.hpp"

namespace reskit {

// Z = { c + G a : a in [-1,1]^q }. Zero generators are allowed (q = 0 is a point).
class Zonotope {
 public:
  Zonotope() = default;
  Zonotope(Vector center, Matrix generators);

  static Zonotope box(Eigen::Index n);
  static Zonotope point(const Vector& x);

  Eigen::Index dim() const { return c_.size(); }
  Eigen::Index order() const { return G_.cols(); }
  const Vector& center() const { return c_; }
  const Matrix& generators() const { return G_; }

  // Dimension of the affine hull.
  int affine_dim(double tol = 1e-9) const;
  // Half-widths of the interval hull.
  Vector radius() const { return G_.cwiseAbs().rowwise().sum(); }

 private:
  Vector c_;
  Matrix G_;
};

// Empty results are reported as std::nullopt.
using MaybeZonotope = std::optional<Zonotope>;

struct HPolytope {
  Matrix normals;  // one unit normal per row
  Vector offsets;  // normals * x <= offsets
  Eigen::Index size() const { return offsets.size(); }
};

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

enum class ContainmentMode { sufficient, exact, automatic };

inline constexpr long default_facet_cap = 100000;
inline constexpr int default_vertex_cap = 20;

Zonotope linear_map(const Matrix& M, const Zonotope& Z);
Zonotope minkowski_sum(const Zonotope& A, const Zonotope& B);
double support(const Zonotope& Z, const Vector& d);

bool contains_point(const Zonotope& Z, const Vector& x, double tol = 1e-9);
// Smallest s >= 0 with x in c + s(Z - c); infinity when x - c is outside the span.
double gauge(const Zonotope& Z, const Vector& x);

// Generator-based sufficient test: exists Gamma, beta with G_in = G_out Gamma,
// c_in - c_out = G_out beta and every row of [Gamma beta] of 1-norm <= 1.
bool contains_sufficient(const Zonotope& outer, const Zonotope& inner, double tol = 1e-9);
// Facet comparison in the span of the outer generators. Exact.
bool contains_exact(const Zonotope& outer, const Zonotope& inner, double tol = 1e-9,
                    long facet_cap = default_facet_cap);
bool contains_zonotope(const Zonotope& outer, const Zonotope& inner,
                       ContainmentMode mode = ContainmentMode::automatic, double tol = 1e-9,
                       long facet_cap = default_facet_cap);
// A direction d with h_inner(d) > h_outer(d), if one exists.
std::optional<Vector> separating_direction(const Zonotope& outer, const Zonotope& inner, double tol = 1e-9,
                                           long facet_cap = default_facet_cap);

struct InnerDifference {
  MaybeZonotope set;
  bool exact = false;            // the zonotope equals the true difference
  bool used_fallback = false;    // facet cap hit; common-scale search was used
  Vector scales;                 // per-generator contraction of the minuend
};

// Zonotopic inner approximation of {x : x + Zs in Zm} for centred Zm.
InnerDifference inner_minkowski_difference(const Zonotope& Zm, const Zonotope& Zs, double tol = 1e-9,
                                           long facet_cap = default_facet_cap);

Zonotope project(const Zonotope& Z, const std::vector<int>& dims);

// Requires a full-dimensional zonotope.
HPolytope facets(const Zonotope& Z, long facet_cap = default_facet_cap, double tol = 1e-9);

// Vertex candidates via sign enumeration; duplicates removed.
std::vector<Vector> vertices(const Zonotope& Z, int gen_cap = default_vertex_cap);

// Vertices of a 2-D zonotope in counter-clockwise order.
std::vector<Eigen::Vector2d> polygon(const Zonotope& Z);

Interval extent(const Zonotope& Z, int dim);
// Range of coordinate `dim` over the points of Z with x_fixed = value.
std::optional<Interval> slice_extent(const Zonotope& Z, int dim, int fixed, double value);

}  // namespace reskit
