#include "reskit/quantitative.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "reskit/errors.hpp"

namespace reskit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Matrix require_spd_factor(const Matrix& P) {
  if (!is_symmetric_positive_definite(P)) throw PreconditionError("P is not symmetric positive definite");
  return Eigen::LLT<Matrix>(0.5 * (P + P.transpose())).matrixL();
}

void require_centred(const Zonotope& Z, const char* op) {
  const double scale = std::max(1.0, Z.radius().maxCoeff());
  if (Z.center().cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw PreconditionError(std::string(op) + ": zonotope must be centred at the origin");
}

// max over points of ||x||_P, points given as columns.
double max_p_norm(const Matrix& L, const std::vector<Vector>& pts) {
  double best = 0.0;
  for (const auto& v : pts) best = std::max(best, (L.transpose() * v).norm());
  return best;
}

double sampled_max(const Matrix& L, const Matrix& G) {
  std::mt19937_64 rng(12345);
  std::bernoulli_distribution coin(0.5);
  double best = 0.0;
  for (int s = 0; s < 65536; ++s) {
    Vector v = Vector::Zero(G.rows());
    for (Eigen::Index j = 0; j < G.cols(); ++j) v += (coin(rng) ? 1.0 : -1.0) * G.col(j);
    best = std::max(best, (L.transpose() * v).norm());
  }
  return best;
}

double vertex_max(const Matrix& P, const Zonotope& Z, int gen_cap) {
  const Matrix L = require_spd_factor(P);
  if (P.rows() != Z.dim()) throw DimensionError("P and the set have different dimensions");
  try {
    return max_p_norm(L, vertices(Z, gen_cap));
  } catch (const CapacityError& e) {
    throw CapacityError(std::string(e.what()) + " (sampled lower bound attached)", sampled_max(L, Z.generators()));
  }
}

// P-norm inradius from an H-representation of a centred set: the nearest facet
// at dual-norm distance offset / ||n||_{P^-1}.
double inradius(const Matrix& P, const HPolytope& H) {
  const Eigen::LLT<Matrix> llt(0.5 * (P + P.transpose()));
  double best = kInf;
  for (Eigen::Index k = 0; k < H.size(); ++k) {
    const Vector nk = H.normals.row(k).transpose();
    const double dual = std::sqrt(nk.dot(llt.solve(nk)));
    best = std::min(best, H.offsets(k) / dual);
  }
  return best;
}

// Norm data that does not depend on the pair: vertex sets and facets.
struct Prepared {
  std::vector<Vector> bbar_vertices;
  std::optional<HPolytope> bbar_facets;
  std::vector<Vector> z_vertices;
  std::optional<HPolytope> z_facets;
  bool has_z = false;
};

Prepared prepare(const NormGeometry& g) {
  Prepared p;
  const Eigen::Index n = g.B_bar.rows();
  const Zonotope BU(Vector::Zero(n), g.B_bar);
  p.bbar_vertices = vertices(BU, default_vertex_cap);
  if (numerical_rank(g.B_bar) == n) p.bbar_facets = facets(BU);
  if (g.Z) {
    require_centred(*g.Z, "norm geometry");
    p.has_z = true;
    p.z_vertices = vertices(*g.Z, default_vertex_cap);
    if (g.Z->affine_dim() == n) p.z_facets = facets(*g.Z);
  }
  return p;
}

LyapunovPair finish_pair(Matrix P, Matrix Q, const Prepared& prep, std::string source) {
  LyapunovPair pr;
  Eigen::SelfAdjointEigenSolver<Matrix> ep(P, Eigen::EigenvaluesOnly), eq(Q, Eigen::EigenvaluesOnly);
  pr.lam_min_P = ep.eigenvalues().minCoeff();
  pr.lam_max_P = ep.eigenvalues().maxCoeff();
  pr.lam_min_Q = eq.eigenvalues().minCoeff();
  pr.lam_max_Q = eq.eigenvalues().maxCoeff();
  if (!(pr.lam_min_P > 0.0) || !(pr.lam_min_Q > 0.0)) throw PreconditionError("pair is not positive definite");
  const Matrix L = Eigen::LLT<Matrix>(P).matrixL();
  pr.b_max = max_p_norm(L, prep.bbar_vertices);
  pr.b_min = prep.bbar_facets ? inradius(P, *prep.bbar_facets) : 0.0;
  pr.has_z = prep.has_z;
  if (prep.has_z) pr.z_max = max_p_norm(L, prep.z_vertices);
  pr.z_interior = prep.z_facets.has_value();
  if (pr.z_interior) pr.z_min = inradius(P, *prep.z_facets);
  pr.P = std::move(P);
  pr.Q = std::move(Q);
  pr.source = std::move(source);
  return pr;
}

LyapunovPair pair_with(const Matrix& A, const Matrix& Q, const Prepared& prep, std::string source) {
  return finish_pair(solve_lyapunov(A, Q), Q, prep, std::move(source));
}

double lower_form(double lmin_P, double lmax_Q, double s, double beta) {
  return 2.0 * lmin_P / lmax_Q * std::log1p(lmax_Q * s / (2.0 * lmin_P * beta));
}

double upper_form(double lmax_P, double lmin_Q, double s, double kappa) {
  return 2.0 * lmax_P / lmin_Q * std::log1p(lmin_Q * s / (2.0 * lmax_P * kappa));
}

}  // namespace

double b_max(const Matrix& P, const Matrix& B_bar, int gen_cap) {
  return vertex_max(P, Zonotope(Vector::Zero(B_bar.rows()), B_bar), gen_cap);
}

double z_max(const Matrix& P, const Zonotope& Z, int gen_cap) { return vertex_max(P, Z, gen_cap); }

double z_min(const Matrix& P, const Zonotope& Z, long facet_cap) {
  if (P.rows() != Z.dim()) throw DimensionError("z_min: P and Z have different dimensions");
  require_centred(Z, "z_min");
  const Matrix L = require_spd_factor(P);
  // ||x||_P = ||L^T x||_2: measure the Euclidean inradius of L^T Z.
  const HPolytope H = facets(linear_map(L.transpose(), Z), facet_cap);
  return H.offsets.minCoeff();
}

double b_min(const Matrix& P, const Matrix& B_bar, long facet_cap) {
  require_spd_factor(P);
  if (numerical_rank(B_bar) < B_bar.rows()) return 0.0;
  return z_min(P, Zonotope(Vector::Zero(B_bar.rows()), B_bar), facet_cap);
}

Matrix ellipsoid_fit_P(const Zonotope& Z, long facet_cap) {
  require_centred(Z, "ellipsoid_fit_P");
  const HPolytope H = facets(Z, facet_cap);
  const Eigen::Index n = Z.dim(), K = H.size();
  // Polar points: the ellipsoid sits inside every facet iff y^T P^-1 y <= 1, so
  // the largest inscribed ellipsoid is the polar of the smallest enclosing
  // centred ellipsoid of {y_k}. Solved with Khachiyan's method plus away steps.
  Matrix Y(n, K);
  for (Eigen::Index k = 0; k < K; ++k) Y.col(k) = H.normals.row(k).transpose() / H.offsets(k);
  Vector u = Vector::Constant(K, 1.0 / static_cast<double>(K));
  const double dn = static_cast<double>(n);
  Matrix M;
  for (long it = 0; it < 200000; ++it) {
    M = Y * u.asDiagonal() * Y.transpose();
    const Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) throw NumericalError("ellipsoid_fit_P: singular moment matrix", it);
    const Matrix S = llt.matrixL().solve(Y);
    const Vector kappa = S.colwise().squaredNorm().transpose();
    Eigen::Index j = 0, k = -1;
    kappa.maxCoeff(&j);
    double kmin = kInf;
    for (Eigen::Index i = 0; i < K; ++i)
      if (u(i) > 0.0 && kappa(i) < kmin) {
        kmin = kappa(i);
        k = i;
      }
    const double up = kappa(j) - dn, down = dn - kmin;
    if (up <= 1e-9 * dn && down <= 1e-9 * dn) break;
    if (up >= down) {
      const double step = up / (dn * (kappa(j) - 1.0));
      u *= 1.0 - step;
      u(j) += step;
    } else {
      const double cap = -u(k) / (1.0 - u(k));
      const double step = kmin > 1.0 ? std::max((kmin - dn) / (dn * (kmin - 1.0)), cap) : cap;
      u *= 1.0 - step;
      u(k) += step;
      if (u(k) < 1e-15) u(k) = 0.0;
    }
  }
  M = Y * u.asDiagonal() * Y.transpose();
  const Matrix W = (dn * M).inverse();
  double s = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) s = std::max(s, Y.col(k).dot(W * Y.col(k)));
  Matrix P = s * dn * M;
  return 0.5 * (P + P.transpose());
}

LyapunovPair make_pair(const Matrix& A, const Matrix& Q, const NormGeometry& geom, std::string source) {
  return pair_with(A, Q, prepare(geom), std::move(source));
}

LyapunovPair pair_from_P(const Matrix& A, const Matrix& P, const NormGeometry& geom, std::string source) {
  check_square(A, "A");
  if (P.rows() != A.rows()) throw DimensionError("pair_from_P: size mismatch");
  Matrix Q = -(A.transpose() * P + P * A);
  Q = (0.5 * (Q + Q.transpose())).eval();
  if (!is_symmetric_positive_definite(Q))
    throw PreconditionError("pair_from_P: -(A^T P + P A) is not positive definite for this P");
  return finish_pair(P, Q, prepare(geom), std::move(source));
}

Matrix sample_Q(Eigen::Index n, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index + 1)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = gauss(rng);
  Matrix Q = G.transpose() * G;
  Q += 1e-6 * Q.trace() * Matrix::Identity(n, n);
  return 0.5 * (Q + Q.transpose());
}

std::vector<LyapunovPair> sample_pairs(const Matrix& A, const NormGeometry& geom, int count, std::uint64_t seed,
                                       int threads) {
  check_square(A, "A");
  if (count < 1) throw ArgumentError("sample_pairs: count must be positive");
  if (!is_hurwitz(A, 0.0)) throw PreconditionError("sample_pairs: A is not Hurwitz");
  const Prepared prep = prepare(geom);
  std::vector<std::optional<LyapunovPair>> slots(static_cast<std::size_t>(count));
  auto work = [&](int first, int stride) {
    for (int i = first; i < count; i += stride)
      slots[static_cast<std::size_t>(i)] =
          pair_with(A, sample_Q(A.rows(), seed, static_cast<std::uint64_t>(i)), prep, "sample:" + std::to_string(i));
  };
  threads = std::clamp(threads, 1, count);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<LyapunovPair> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

TimeBounds reach_time_bounds(const LyapunovPair& pr, const Vector& x0, const BoundHypotheses& hyp) {
  TimeBounds tb;
  const double s = p_norm(pr.P, x0);
  tb.T_N.lo = lower_form(pr.lam_min_P, pr.lam_max_Q, s, pr.b_max);
  if (hyp.full_rank_B && pr.b_min > 0.0) {
    tb.T_N.hi = upper_form(pr.lam_max_P, pr.lam_min_Q, s, pr.b_min);
  } else {
    tb.T_N.hi = kInf;
    tb.flags.push_back("T_N upper open: B_bar does not have full row rank");
  }
  if (hyp.resiliently_stabilizable && pr.has_z && pr.z_max > 0.0) {
    tb.T_M.lo = lower_form(pr.lam_min_P, pr.lam_max_Q, s, pr.z_max);
  } else {
    tb.T_M.lo = 0.0;
    tb.flags.push_back("T_M lower open: system is not resiliently stabilizable or Z is trivial");
  }
  if (hyp.z_interior && pr.z_interior && pr.z_min > 0.0) {
    tb.T_M.hi = upper_form(pr.lam_max_P, pr.lam_min_Q, s, pr.z_min);
  } else {
    tb.T_M.hi = kInf;
    tb.flags.push_back("T_M upper open: Z has empty interior");
  }
  if (s == 0.0) tb.T_N.hi = tb.T_M.hi = 0.0;
  return tb;
}

RqBounds rq_bounds(const LyapunovPair& pr, const BoundHypotheses& hyp) {
  RqBounds rq;
  const double a = pr.lam_min_P * pr.lam_min_Q / (pr.lam_max_P * pr.lam_max_Q);
  if (hyp.z_interior && pr.z_interior && pr.b_max > 0.0) {
    const double zb = pr.z_min / pr.b_max;
    rq.lower = std::min(a, zb);
    rq.lower_max_form = std::max(a, zb);
  } else {
    rq.flags.push_back("r_q lower open: Z has empty interior");
  }
  if (hyp.full_rank_B && hyp.resiliently_stabilizable && pr.has_z && pr.b_min > 0.0) {
    rq.upper = std::min(1.0 / a, pr.z_max / pr.b_min);
    if (rq.upper > 1.0) {
      rq.upper = 1.0;
      rq.clamped = true;
      rq.flags.push_back("r_q upper clamped to 1");
    }
  } else {
    rq.upper = 1.0;
    rq.flags.push_back("r_q upper open: needs full-rank B_bar and resilient stabilizability");
  }
  return rq;
}

void BoundsSummary::absorb(const LyapunovPair& pair, const TimeBounds& tb, const RqBounds& rq) {
  if (pairs++ == 0) {
    T_N = {-kInf, kInf};
    T_M = {-kInf, kInf};
    rq_lower = rq_lower_max_form = -kInf;
    rq_upper = kInf;
    rq_clamped = true;
  }
  auto up = [&](double v, double& dst, std::string& who) {
    if (v > dst) {
      dst = v;
      who = pair.source;
    }
  };
  auto down = [&](double v, double& dst, std::string& who) {
    if (v < dst) {
      dst = v;
      who = pair.source;
    }
  };
  up(tb.T_N.lo, T_N.lo, T_N_lower_id);
  down(tb.T_N.hi, T_N.hi, T_N_upper_id);
  up(tb.T_M.lo, T_M.lo, T_M_lower_id);
  down(tb.T_M.hi, T_M.hi, T_M_upper_id);
  up(rq.lower, rq_lower, rq_lower_id);
  down(rq.upper, rq_upper, rq_upper_id);
  rq_lower_max_form = std::max(rq_lower_max_form, rq.lower_max_form);
  rq_clamped = rq_clamped && rq.clamped;
}

BoundsReport compute_bounds(const LinearSystem& sys, const ControlSplit& split, const Vector& x0,
                            const BoundsOptions& opt) {
  const Eigen::Index n = sys.A.rows();
  if (x0.size() != n) throw DimensionError("compute_bounds: x0 has the wrong length");
  if (!is_hurwitz(sys.A, 0.0)) throw PreconditionError("compute_bounds: A is not Hurwitz");

  BoundsReport rep;
  rep.x0 = x0;
  const ResilienceVerdict verdict = analyze_resilience(sys, split, opt.tol);
  const ZSet z = compute_z_set(split, opt.tol);
  rep.hypotheses.full_rank_B = numerical_rank(sys.B_bar, opt.tol.rank) == n;
  rep.hypotheses.resiliently_stabilizable = verdict.resiliently_stabilizable;
  rep.hypotheses.z_interior = !z.empty() && *z.affine_dim == n;
  const NormGeometry geom{sys.B_bar, z.inner};

  std::vector<std::pair<std::string, std::vector<LyapunovPair>>> groups;
  if (opt.samples > 0) groups.emplace_back("stochastic", sample_pairs(sys.A, geom, opt.samples, opt.seed, opt.threads));
  if (opt.ellipsoid) {
    if (rep.hypotheses.z_interior) {
      try {
        groups.emplace_back("ellipsoid",
                            std::vector<LyapunovPair>{pair_from_P(sys.A, ellipsoid_fit_P(*z.inner), geom, "ellipsoid")});
      } catch (const PreconditionError& e) {
        rep.notes.push_back(std::string("ellipsoid pair skipped: ") + e.what());
      }
    } else {
      rep.notes.push_back("ellipsoid pair skipped: Z has empty interior");
    }
  }
  if (opt.identity) {
    if (is_symmetric_positive_definite(Matrix(-(sys.A + sys.A.transpose())))) {
      groups.emplace_back("identity", std::vector<LyapunovPair>{
                                          pair_from_P(sys.A, Matrix::Identity(n, n), geom, "identity")});
    } else {
      rep.notes.push_back("identity pair skipped: A + A^T is not negative definite");
    }
  }
  if (groups.empty()) throw ArgumentError("compute_bounds: no pairs to evaluate");

  rep.best.source = "all";
  for (const auto& [name, pairs] : groups) {
    BoundsSummary s;
    s.source = name;
    for (const auto& pr : pairs) {
      const TimeBounds tb = reach_time_bounds(pr, x0, rep.hypotheses);
      const RqBounds rq = rq_bounds(pr, rep.hypotheses);
      s.absorb(pr, tb, rq);
      rep.best.absorb(pr, tb, rq);
      for (const auto& f : tb.flags)
        if (std::find(rep.flags.begin(), rep.flags.end(), f) == rep.flags.end()) rep.flags.push_back(f);
      for (const auto& f : rq.flags)
        if (!rq.clamped && std::find(rep.flags.begin(), rep.flags.end(), f) == rep.flags.end()) rep.flags.push_back(f);
    }
    rep.sources.push_back(std::move(s));
  }
  if (rep.best.rq_clamped) rep.flags.push_back("r_q upper clamped to 1: every pair gave a ratio above 1");
  if (!rep.hypotheses.resiliently_stabilizable) rep.notes.push_back("system is not resiliently stabilizable");
  return rep;
}

}  // namespace reskit
