#include "reskit/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "reskit/errors.hpp"
#include "reskit/lp.hpp"

namespace reskit {

namespace {

void require_same_dim(const Zonotope& a, const Zonotope& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw DimensionError(os.str());
  }
}

Matrix nonzero_columns(const Matrix& G) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    if (G.col(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
  Matrix out(G.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = G.col(keep[k]);
  return out;
}

double binomial(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::vector<long long> quantise(const Vector& v, double scale) {
  std::vector<long long> key(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(v(i) * scale);
  return key;
}

// Coordinates in which the outer zonotope's generators span the whole space.
struct SpanFrame {
  Matrix U;  // n x r, orthonormal
  bool full;
  Vector to(const Vector& x) const { return full ? x : Vector(U.transpose() * x); }
  Matrix to(const Matrix& X) const { return full ? X : Matrix(U.transpose() * X); }
  Vector lift(const Vector& y) const { return full ? y : Vector(U * y); }
  // Largest component of the columns of X outside the span.
  double leak(const Matrix& X) const {
    if (full || X.cols() == 0) return 0.0;
    return (X - U * (U.transpose() * X)).cwiseAbs().maxCoeff();
  }
};

SpanFrame span_frame(const Matrix& G, double tol) {
  Matrix U = column_space(G, tol);
  const bool full = U.cols() == G.rows();
  return {full ? Matrix::Identity(G.rows(), G.rows()) : U, full};
}

Interval optimise_coordinate(const Zonotope& Z, int dim, int fixed, double value, bool& feasible) {
  const Eigen::Index q = Z.order();
  auto pb = lp::Problem::with_variables(q);
  pb.lower = Vector::Constant(q, -1.0);
  pb.upper = Vector::Constant(q, 1.0);
  pb.A_eq = Z.generators().row(fixed);
  pb.b_eq = Vector::Constant(1, value - Z.center()(fixed));
  Interval out{0.0, 0.0};
  feasible = true;
  for (int sense : {1, -1}) {
    pb.cost = sense * Z.generators().row(dim).transpose();
    const auto r = lp::solve(pb);
    if (r.status != lp::Status::optimal) {
      feasible = false;
      return out;
    }
    const double v = Z.center()(dim) + Z.generators().row(dim).dot(r.x);
    (sense > 0 ? out.lo : out.hi) = v;
  }
  return out;
}

}  // namespace

Zonotope::Zonotope(Vector center, Matrix generators) : c_(std::move(center)), G_(std::move(generators)) {
  if (G_.cols() == 0) G_.resize(c_.size(), 0);
  if (G_.rows() != c_.size()) {
    std::ostringstream os;
    os << "Zonotope: generators have " << G_.rows() << " rows, center has " << c_.size();
    throw DimensionError(os.str());
  }
  if (!c_.allFinite() || !G_.allFinite()) throw ArgumentError("Zonotope: non-finite entries");
}

Zonotope Zonotope::box(Eigen::Index n) {
  if (n < 1) throw DimensionError("box zonotope needs n >= 1");
  return Zonotope(Vector::Zero(n), Matrix::Identity(n, n));
}

Zonotope Zonotope::point(const Vector& x) { return Zonotope(x, Matrix(x.size(), 0)); }

int Zonotope::affine_dim(double tol) const { return numerical_rank(G_, tol); }

Zonotope linear_map(const Matrix& M, const Zonotope& Z) {
  if (M.cols() != Z.dim()) throw DimensionError("linear_map: matrix columns differ from zonotope dimension");
  return Zonotope(M * Z.center(), M * Z.generators());
}

Zonotope minkowski_sum(const Zonotope& A, const Zonotope& B) {
  require_same_dim(A, B, "minkowski_sum");
  Matrix G(A.dim(), A.order() + B.order());
  G << A.generators(), B.generators();
  return Zonotope(A.center() + B.center(), G);
}

double support(const Zonotope& Z, const Vector& d) {
  if (d.size() != Z.dim()) throw DimensionError("support: direction has wrong length");
  if (d.cwiseAbs().maxCoeff() == 0.0) throw ArgumentError("support: zero direction");
  return d.dot(Z.center()) + (d.transpose() * Z.generators()).cwiseAbs().sum();
}

bool contains_point(const Zonotope& Z, const Vector& x, double tol) {
  if (x.size() != Z.dim()) throw DimensionError("contains_point: point has wrong length");
  const Vector d = x - Z.center();
  const Vector rad = Z.radius();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (std::abs(d(i)) > rad(i) * (1.0 + tol) + tol) return false;
  if (Z.order() == 0) return true;  // interval hull already pinned every coordinate

  const Eigen::Index q = Z.order();
  auto pb = lp::Problem::with_variables(q);
  pb.lower = Vector::Constant(q, -(1.0 + tol));
  pb.upper = Vector::Constant(q, 1.0 + tol);
  pb.A_eq = Z.generators();
  pb.b_eq = d;
  lp::Options opt;
  opt.feasibility = std::max(tol, 1e-12);
  return lp::solve(pb, opt).status == lp::Status::optimal;
}

double gauge(const Zonotope& Z, const Vector& x) {
  if (x.size() != Z.dim()) throw DimensionError("gauge: point has wrong length");
  const Vector d = x - Z.center();
  if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Eigen::Index q = Z.order();
  if (q == 0) return std::numeric_limits<double>::infinity();
  // max s subject to G a = s d, |a| <= 1.
  auto pb = lp::Problem::with_variables(q + 1);
  pb.lower.head(q).setConstant(-1.0);
  pb.upper.head(q).setConstant(1.0);
  pb.A_eq.resize(Z.dim(), q + 1);
  pb.A_eq << Z.generators(), -d;
  pb.b_eq = Vector::Zero(Z.dim());
  pb.cost(q) = -1.0;
  const auto r = lp::solve(pb);
  if (r.status != lp::Status::optimal) throw NumericalError("gauge: linear program failed", r.iterations);
  const double s = r.x(q);
  return s > 1e-300 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

bool contains_sufficient(const Zonotope& outer, const Zonotope& inner, double tol) {
  require_same_dim(outer, inner, "contains_zonotope");
  const Eigen::Index n = outer.dim(), q1 = outer.order(), q2 = inner.order();
  const Vector dc = inner.center() - outer.center();
  if (q1 == 0) {
    return dc.cwiseAbs().maxCoeff() <= tol &&
           (q2 == 0 || inner.generators().cwiseAbs().maxCoeff() <= tol);
  }
  // Variables: Gamma+ (q1*q2), Gamma- (q1*q2), beta+ (q1), beta- (q1), all >= 0.
  const Eigen::Index ng = q1 * q2, nv = 2 * ng + 2 * q1;
  auto pb = lp::Problem::with_variables(nv);
  pb.A_eq = Matrix::Zero(n * (q2 + 1), nv);
  pb.b_eq = Vector::Zero(n * (q2 + 1));
  const Matrix& G1 = outer.generators();
  for (Eigen::Index k = 0; k < q2; ++k)
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index row = k * n + r;
      for (Eigen::Index i = 0; i < q1; ++i) {
        pb.A_eq(row, i * q2 + k) = G1(r, i);
        pb.A_eq(row, ng + i * q2 + k) = -G1(r, i);
      }
      pb.b_eq(row) = inner.generators()(r, k);
    }
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index row = q2 * n + r;
    for (Eigen::Index i = 0; i < q1; ++i) {
      pb.A_eq(row, 2 * ng + i) = G1(r, i);
      pb.A_eq(row, 2 * ng + q1 + i) = -G1(r, i);
    }
    pb.b_eq(row) = dc(r);
  }
  pb.A_ub = Matrix::Zero(q1, nv);
  pb.b_ub = Vector::Constant(q1, 1.0 + tol);
  for (Eigen::Index i = 0; i < q1; ++i) {
    for (Eigen::Index k = 0; k < q2; ++k) {
      pb.A_ub(i, i * q2 + k) = 1.0;
      pb.A_ub(i, ng + i * q2 + k) = 1.0;
    }
    pb.A_ub(i, 2 * ng + i) = 1.0;
    pb.A_ub(i, 2 * ng + q1 + i) = 1.0;
  }
  pb.cost = Vector::Ones(nv);  // prefer the sparsest certificate; any feasible point will do
  lp::Options opt;
  opt.feasibility = std::max(tol, 1e-12);
  return lp::solve(pb, opt).status == lp::Status::optimal;
}

std::optional<Vector> separating_direction(const Zonotope& outer, const Zonotope& inner, double tol,
                                           long facet_cap) {
  require_same_dim(outer, inner, "contains_zonotope");
  const Matrix Go = nonzero_columns(outer.generators());
  const Vector dc = inner.center() - outer.center();
  const double scale = std::max({1.0, outer.radius().maxCoeff(), inner.radius().maxCoeff()});

  if (Go.cols() == 0) {
    Matrix all(inner.dim(), inner.order() + 1);
    all << dc, inner.generators();
    for (Eigen::Index j = 0; j < all.cols(); ++j)
      if (all.col(j).norm() > tol * scale) return Vector(all.col(j).normalized());
    return std::nullopt;
  }
  const SpanFrame F = span_frame(Go, tol);
  Matrix all(inner.dim(), inner.order() + 1);
  all << dc, inner.generators();
  if (F.leak(all) > tol * scale) {
    for (Eigen::Index j = 0; j < all.cols(); ++j) {
      Vector out = all.col(j) - F.U * (F.U.transpose() * all.col(j));
      if (out.cwiseAbs().maxCoeff() > tol * scale) return Vector(out.normalized());
    }
  }
  const Zonotope outer_r(Vector::Zero(F.U.cols()), F.to(Go));
  const Vector ci = F.to(dc);
  const Matrix Gi = F.to(inner.generators());
  const HPolytope H = facets(outer_r, facet_cap, tol);
  Eigen::Index worst = -1;
  double worst_gap = 0.0;
  for (Eigen::Index k = 0; k < H.size(); ++k) {
    const Vector nk = H.normals.row(k).transpose();
    const double h = nk.dot(ci) + (nk.transpose() * Gi).cwiseAbs().sum();
    const double gap = h - H.offsets(k);
    if (gap > tol * std::max(1.0, std::abs(H.offsets(k))) && gap > worst_gap) {
      worst_gap = gap;
      worst = k;
    }
  }
  if (worst < 0) return std::nullopt;
  return F.lift(H.normals.row(worst).transpose());
}

bool contains_exact(const Zonotope& outer, const Zonotope& inner, double tol, long facet_cap) {
  return !separating_direction(outer, inner, tol, facet_cap).has_value();
}

bool contains_zonotope(const Zonotope& outer, const Zonotope& inner, ContainmentMode mode, double tol,
                       long facet_cap) {
  require_same_dim(outer, inner, "contains_zonotope");
  switch (mode) {
    case ContainmentMode::sufficient: return contains_sufficient(outer, inner, tol);
    case ContainmentMode::exact: return contains_exact(outer, inner, tol, facet_cap);
    case ContainmentMode::automatic: break;
  }
  if (outer.dim() <= 5) return contains_exact(outer, inner, tol, facet_cap);
  if (contains_sufficient(outer, inner, tol)) return true;
  // The generator test is incomplete; settle a negative answer exactly when the
  // facet count allows it.
  try {
    return contains_exact(outer, inner, tol, facet_cap);
  } catch (const CapacityError&) {
    return false;
  }
}

Zonotope project(const Zonotope& Z, const std::vector<int>& dims) {
  std::set<int> seen;
  for (int d : dims) {
    if (d < 0 || d >= Z.dim()) throw ArgumentError("project: index " + std::to_string(d) + " out of range");
    if (!seen.insert(d).second) throw ArgumentError("project: repeated index " + std::to_string(d));
  }
  const auto k = static_cast<Eigen::Index>(dims.size());
  Vector c(k);
  Matrix G(k, Z.order());
  for (Eigen::Index i = 0; i < k; ++i) {
    c(i) = Z.center()(dims[static_cast<std::size_t>(i)]);
    G.row(i) = Z.generators().row(dims[static_cast<std::size_t>(i)]);
  }
  return Zonotope(c, G);
}

HPolytope facets(const Zonotope& Z, long facet_cap, double tol) {
  const Eigen::Index n = Z.dim();
  const Matrix G = nonzero_columns(Z.generators());
  const int adim = numerical_rank(G, tol);
  if (adim < n) throw RankError("facets: zonotope is flat (affine dimension " + std::to_string(adim) + ")", adim);
  const Eigen::Index q = G.cols();
  if (binomial(q, n - 1) > static_cast<double>(facet_cap))
    throw CapacityError("facets: " + std::to_string(q) + " generators in dimension " + std::to_string(n) +
                        " exceed the facet cap; use sufficient containment instead");

  std::vector<Vector> normals;
  std::set<std::vector<long long>> seen;
  auto add = [&](Vector nv) {
    // Canonical sign so that +n and -n share a key.
    Eigen::Index lead = 0;
    nv.cwiseAbs().maxCoeff(&lead);
    if (nv(lead) < 0) nv = -nv;
    if (!seen.insert(quantise(nv, 1e8)).second) return;
    normals.push_back(nv);
    normals.push_back(-nv);
  };

  if (n == 1) {
    add(Vector::Ones(1));
  } else {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n - 1));
    std::iota(idx.begin(), idx.end(), 0);
    Matrix S(n, n - 1);
    while (true) {
      for (Eigen::Index k = 0; k < n - 1; ++k) S.col(k) = G.col(idx[static_cast<std::size_t>(k)]);
      Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullU);
      const auto& s = svd.singularValues();
      if (s(n - 2) > tol * s(0)) add(svd.matrixU().col(n - 1));
      // Next combination in lexicographic order.
      Eigen::Index k = n - 2;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == q - (n - 1) + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (Eigen::Index j = k + 1; j < n - 1; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  HPolytope H;
  H.normals.resize(static_cast<Eigen::Index>(normals.size()), n);
  H.offsets.resize(static_cast<Eigen::Index>(normals.size()));
  for (std::size_t k = 0; k < normals.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    H.normals.row(r) = normals[k].transpose();
    H.offsets(r) = normals[k].dot(Z.center()) + (normals[k].transpose() * G).cwiseAbs().sum();
  }
  return H;
}

std::vector<Vector> vertices(const Zonotope& Z, int gen_cap) {
  const Matrix G = nonzero_columns(Z.generators());
  const Eigen::Index q = G.cols();
  if (q > gen_cap)
    throw CapacityError("vertices: " + std::to_string(q) + " generators exceed the enumeration cap of " +
                        std::to_string(gen_cap));
  std::vector<Vector> out;
  std::set<std::vector<long long>> seen;
  const double scale = 1e9 / std::max({1.0, G.cwiseAbs().maxCoeff() * static_cast<double>(q), Z.center().cwiseAbs().maxCoeff()});
  const unsigned long total = 1ul << q;
  for (unsigned long mask = 0; mask < total; ++mask) {
    Vector v = Z.center();
    for (Eigen::Index j = 0; j < q; ++j) v += ((mask >> j) & 1ul ? 1.0 : -1.0) * G.col(j);
    if (seen.insert(quantise(v, scale)).second) out.push_back(std::move(v));
  }
  return out;
}

std::vector<Eigen::Vector2d> polygon(const Zonotope& Z) {
  if (Z.dim() != 2) throw DimensionError("polygon: zonotope must be 2-D");
  Matrix G = nonzero_columns(Z.generators());
  // Orient every generator into the upper half plane, then walk them by angle.
  std::vector<Eigen::Vector2d> gens;
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    Eigen::Vector2d g = G.col(j);
    if (g.y() < 0 || (g.y() == 0 && g.x() < 0)) g = -g;
    gens.push_back(g);
  }
  std::sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) {
    return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
  });
  // Merge parallel generators.
  std::vector<Eigen::Vector2d> merged;
  for (const auto& g : gens) {
    if (!merged.empty()) {
      auto& h = merged.back();
      const double cross = h.x() * g.y() - h.y() * g.x();
      if (std::abs(cross) <= 1e-12 * h.norm() * g.norm()) {
        h += g;
        continue;
      }
    }
    merged.push_back(g);
  }
  const Eigen::Vector2d c = Z.center();
  if (merged.empty()) return {c};
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (const auto& g : merged) sum += g;
  if (merged.size() == 1) return {c - sum, c + sum};
  std::vector<Eigen::Vector2d> out;
  // Start at the bottom (most negative) vertex and go counter-clockwise.
  Eigen::Vector2d p = c - sum;
  for (const auto& g : merged) {
    out.push_back(p);
    p += 2.0 * g;
  }
  for (const auto& g : merged) {
    out.push_back(p);
    p -= 2.0 * g;
  }
  return out;
}

Interval extent(const Zonotope& Z, int dim) {
  if (dim < 0 || dim >= Z.dim()) throw ArgumentError("extent: index out of range");
  const double r = Z.generators().row(dim).cwiseAbs().sum();
  return {Z.center()(dim) - r, Z.center()(dim) + r};
}

std::optional<Interval> slice_extent(const Zonotope& Z, int dim, int fixed, double value) {
  if (dim < 0 || dim >= Z.dim() || fixed < 0 || fixed >= Z.dim())
    throw ArgumentError("slice_extent: index out of range");
  if (Z.order() == 0) {
    if (std::abs(Z.center()(fixed) - value) > 1e-12) return std::nullopt;
    return Interval{Z.center()(dim), Z.center()(dim)};
  }
  bool feasible = true;
  const Interval iv = optimise_coordinate(Z, dim, fixed, value, feasible);
  if (!feasible) return std::nullopt;
  return iv;
}

InnerDifference inner_minkowski_difference(const Zonotope& Zm, const Zonotope& Zs, double tol, long facet_cap) {
  require_same_dim(Zm, Zs, "inner_minkowski_difference");
  const double scale = std::max({1.0, Zm.radius().maxCoeff(), Zs.radius().maxCoeff()});
  if (Zm.center().cwiseAbs().maxCoeff() > tol * scale || Zs.center().cwiseAbs().maxCoeff() > tol * scale)
    throw PreconditionError("inner_minkowski_difference: operands must be centred at the origin");

  InnerDifference out;
  const Eigen::Index n = Zm.dim(), q = Zm.order();
  const Matrix Gs = nonzero_columns(Zs.generators());
  if (Gs.cols() == 0) {
    out.set = Zonotope(Vector::Zero(n), Zm.generators());
    out.exact = true;
    out.scales = Vector::Ones(q);
    return out;
  }
  if (!contains_zonotope(Zm, Zs, ContainmentMode::automatic, tol, facet_cap)) return out;

  const Matrix& Gm = Zm.generators();
  const SpanFrame F = span_frame(Gm, tol);
  const Matrix Gm_r = F.to(Gm);
  const Matrix Gs_r = F.to(Gs);
  Vector lam = Vector::Zero(q);

  HPolytope H;
  bool have_facets = true;
  try {
    H = facets(Zonotope(Vector::Zero(Gm_r.rows()), Gm_r), facet_cap, tol);
  } catch (const CapacityError&) {
    have_facets = false;
  }

  Vector rhs;
  if (have_facets) {
    // Per-generator contraction factors: keep lam_i g_i for every generator and
    // require h_G(n) + h_Zs(n) <= offset(n) on each facet; maximise sum(lam).
    const Eigen::Index K = H.size();
    rhs.resize(K);
    Matrix M(K, q);
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto nk = H.normals.row(k);
      rhs(k) = std::max(H.offsets(k) - (nk * Gs_r).cwiseAbs().sum(), 0.0);
      M.row(k) = (nk * Gm_r).cwiseAbs();
    }
    auto pb = lp::Problem::with_variables(q);
    pb.upper = Vector::Ones(q);
    pb.A_ub = M;
    pb.b_ub = rhs;
    pb.cost = -Vector::Ones(q);
    const auto r = lp::solve(pb);
    if (r.status != lp::Status::optimal)
      throw NumericalError("inner_minkowski_difference: contraction program failed", r.iterations);
    lam = r.x.cwiseMax(0.0).cwiseMin(1.0);
    // Pull back any constraint overshoot left by the solver tolerance.
    const Vector lhs = M * lam;
    double shrink = 1.0;
    for (Eigen::Index k = 0; k < K; ++k)
      if (lhs(k) > rhs(k) && lhs(k) > 0.0) shrink = std::min(shrink, rhs(k) / lhs(k));
    lam *= shrink;
  } else {
    out.used_fallback = true;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Zonotope cand = minkowski_sum(Zonotope(Vector::Zero(n), mid * Gm), Zonotope(Vector::Zero(n), Gs));
      (contains_sufficient(Zm, cand, tol) ? lo : hi) = mid;
    }
    lam.setConstant(lo);
  }
  for (Eigen::Index i = 0; i < q; ++i)
    if (lam(i) < 1e-12) lam(i) = 0.0;
  out.scales = lam;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < q; ++i)
    if (lam(i) > 0.0 && Gm.col(i).cwiseAbs().maxCoeff() > 0.0) keep.push_back(i);
  Matrix G(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    G.col(static_cast<Eigen::Index>(k)) = lam(keep[k]) * Gm.col(keep[k]);
  out.set = Zonotope(Vector::Zero(n), G);

  // Exactness: the true difference D = {y : N y <= rhs} must sit inside G.
  if (have_facets) {
    const Matrix G_r = F.to(G);
    const Eigen::Index r = G_r.rows();
    if (r > 0 && numerical_rank(G_r, tol) == r) {
      try {
        const HPolytope HG = facets(Zonotope(Vector::Zero(r), G_r), facet_cap, tol);
        bool exact = true;
        auto pb = lp::Problem::with_variables(r);
        pb.lower = Vector::Constant(r, -lp::inf);
        pb.A_ub = H.normals;
        pb.b_ub = rhs;
        for (Eigen::Index k = 0; k < HG.size() && exact; ++k) {
          pb.cost = -HG.normals.row(k).transpose();
          const auto res = lp::solve(pb);
          if (res.status != lp::Status::optimal || -res.objective > HG.offsets(k) + 1e-7 * std::max(1.0, HG.offsets(k)))
            exact = false;
        }
        out.exact = exact;
      } catch (const CapacityError&) {
        out.exact = false;
      }
    } else {
      // A flat result is exact only in the degenerate case D = G = {0}.
      out.exact = G_r.cols() == 0 && rhs.maxCoeff() <= tol;
    }
  }
  return out;
}

}  // namespace reskit
