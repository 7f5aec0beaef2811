#include "reskit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reskit/errors.hpp"

namespace reskit::lp {

Problem Problem::with_variables(Eigen::Index n) {
  Problem p;
  p.cost = Vector::Zero(n);
  p.A_eq = Matrix(0, n);
  p.b_eq = Vector(0);
  p.A_ub = Matrix(0, n);
  p.b_ub = Vector(0);
  p.lower = Vector::Zero(n);
  p.upper = Vector::Constant(n, inf);
  return p;
}

namespace {

// How an original variable maps onto nonnegative tableau columns.
struct VarMap {
  enum Kind { shifted, reflected, split } kind;
  Eigen::Index col;  // first tableau column
  double offset;     // l for shifted, u for reflected
};

enum class At : unsigned char { lower, upper, basic };

class Tableau {
 public:
  Matrix T;
  Vector beta;  // values of basic variables
  Vector ub;    // column upper bounds (lower is always 0)
  std::vector<Eigen::Index> basis;
  std::vector<At> state;
  Vector d;  // reduced costs
  long iterations = 0;

  double value(Eigen::Index j) const { return state[j] == At::upper ? ub(j) : 0.0; }

  void price(const Vector& c) {
    d = c;
    for (Eigen::Index i = 0; i < T.rows(); ++i)
      if (c(basis[i]) != 0.0) d -= c(basis[i]) * T.row(i).transpose();
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double p = T(r, q);
    T.row(r) /= p;
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, q);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    const double fq = d(q);
    if (fq != 0.0) d -= fq * T.row(r).transpose();
    T.col(q).setZero();
    T(r, q) = 1.0;
    d(q) = 0.0;
  }

  // Runs simplex iterations against the currently priced objective.
  Status optimise(const Options& opt) {
    long degenerate_run = 0;
    const Eigen::Index m = T.rows();
    const Eigen::Index n = T.cols();
    while (true) {
      if (++iterations > opt.max_iterations)
        throw NumericalError("simplex: iteration limit reached", iterations);
      const bool bland = degenerate_run > 50;
      Eigen::Index q = -1;
      double best = 0.0;
      int dir = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (state[j] == At::basic || ub(j) <= 0.0) continue;
        double score = 0.0;
        int dj = 0;
        if (state[j] == At::lower && d(j) < -opt.optimality) {
          score = -d(j);
          dj = 1;
        } else if (state[j] == At::upper && d(j) > opt.optimality) {
          score = d(j);
          dj = -1;
        }
        if (dj == 0) continue;
        if (bland) {
          q = j;
          dir = dj;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dir = dj;
        }
      }
      if (q < 0) return Status::optimal;

      double theta = ub(q);
      Eigen::Index r = -1;
      bool to_upper = false;
      double rpiv = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = dir * T(i, q);
        double lim;
        bool up;
        if (a > opt.pivot) {
          lim = std::max(beta(i), 0.0) / a;
          up = false;
        } else if (a < -opt.pivot && std::isfinite(ub(basis[i]))) {
          lim = std::max(ub(basis[i]) - beta(i), 0.0) / -a;
          up = true;
        } else {
          continue;
        }
        const bool better = lim < theta - 1e-14 ||
                            (lim <= theta + 1e-14 && r >= 0 &&
                             (bland ? basis[i] < basis[r] : std::abs(a) > rpiv));
        if (better || (r < 0 && lim <= theta)) {
          theta = lim;
          r = i;
          to_upper = up;
          rpiv = std::abs(a);
        }
      }
      if (!std::isfinite(theta)) return Status::unbounded;
      degenerate_run = theta <= 1e-13 ? degenerate_run + 1 : 0;

      if (theta != 0.0) beta -= (dir * theta) * T.col(q);
      if (r < 0) {
        state[q] = state[q] == At::lower ? At::upper : At::lower;
        continue;
      }
      const double entering = state[q] == At::lower ? theta : ub(q) - theta;
      const Eigen::Index leaving = basis[r];
      state[leaving] = to_upper ? At::upper : At::lower;
      pivot(r, q);
      basis[r] = q;
      state[q] = At::basic;
      beta(r) = entering;
    }
  }

  void drop_row(Eigen::Index r) {
    const Eigen::Index m = T.rows();
    if (r < m - 1) {
      T.block(r, 0, m - 1 - r, T.cols()) = T.bottomRows(m - 1 - r).eval();
      beta.segment(r, m - 1 - r) = beta.tail(m - 1 - r).eval();
    }
    T.conservativeResize(m - 1, Eigen::NoChange);
    beta.conservativeResize(m - 1);
    basis.erase(basis.begin() + r);
  }
};

}  // namespace

Result solve(const Problem& pb, const Options& opt) {
  const Eigen::Index nx = pb.cost.size();
  if (pb.A_eq.cols() != nx || pb.A_ub.cols() != nx || pb.lower.size() != nx || pb.upper.size() != nx ||
      pb.A_eq.rows() != pb.b_eq.size() || pb.A_ub.rows() != pb.b_ub.size())
    throw DimensionError("lp::solve: inconsistent problem dimensions");

  Result res;
  for (Eigen::Index j = 0; j < nx; ++j)
    if (pb.lower(j) > pb.upper(j) + opt.feasibility) return res;

  // Column layout: structural | slacks | artificials.
  std::vector<VarMap> vars(nx);
  Eigen::Index ns = 0;
  for (Eigen::Index j = 0; j < nx; ++j) {
    const double l = pb.lower(j), u = pb.upper(j);
    if (std::isfinite(l)) vars[j] = {VarMap::shifted, ns++, l};
    else if (std::isfinite(u)) vars[j] = {VarMap::reflected, ns++, u};
    else {
      vars[j] = {VarMap::split, ns, 0.0};
      ns += 2;
    }
  }
  const Eigen::Index me = pb.A_eq.rows(), mu = pb.A_ub.rows(), m = me + mu;
  Matrix S = Matrix::Zero(m, ns + mu);
  Vector rhs(m);
  Vector ub = Vector::Constant(ns + mu, inf);
  for (Eigen::Index j = 0; j < nx; ++j)
    if (vars[j].kind == VarMap::shifted) ub(vars[j].col) = std::max(pb.upper(j) - pb.lower(j), 0.0);

  auto load = [&](Eigen::Index row, const auto& a, double b) {
    for (Eigen::Index j = 0; j < nx; ++j) {
      const double v = a(j);
      if (v == 0.0) continue;
      const auto& vm = vars[j];
      switch (vm.kind) {
        case VarMap::shifted: S(row, vm.col) += v; b -= v * vm.offset; break;
        case VarMap::reflected: S(row, vm.col) -= v; b -= v * vm.offset; break;
        case VarMap::split: S(row, vm.col) += v; S(row, vm.col + 1) -= v; break;
      }
    }
    rhs(row) = b;
  };
  for (Eigen::Index i = 0; i < me; ++i) load(i, pb.A_eq.row(i), pb.b_eq(i));
  for (Eigen::Index i = 0; i < mu; ++i) {
    load(me + i, pb.A_ub.row(i), pb.b_ub(i));
    S(me + i, ns + i) = 1.0;
  }

  // Equilibrate rows, make right-hand sides nonnegative and decide which rows
  // need an artificial column.
  std::vector<Eigen::Index> keep;
  std::vector<bool> needs_art;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sc = S.row(i).head(ns).cwiseAbs().maxCoeff();
    const bool is_ub = i >= me;
    if (sc == 0.0) {
      // Constraint on constants only.
      const bool ok = is_ub ? rhs(i) >= -opt.feasibility : std::abs(rhs(i)) <= opt.feasibility;
      if (!ok) {
        res.infeasibility = std::abs(rhs(i));
        return res;
      }
      if (!is_ub) continue;
    }
    const double s = sc > 0.0 ? 1.0 / sc : 1.0;
    S.row(i) *= s;
    rhs(i) *= s;
    if (rhs(i) < 0.0) {
      S.row(i) *= -1.0;
      rhs(i) = -rhs(i);
    }
    keep.push_back(i);
    needs_art.push_back(!(is_ub && S(i, ns + (i - me)) > 0.0));
  }

  const Eigen::Index mr = static_cast<Eigen::Index>(keep.size());
  Eigen::Index na = 0;
  for (bool b : needs_art) na += b;
  const Eigen::Index ncol = ns + mu + na;

  Tableau tab;
  tab.T = Matrix::Zero(mr, ncol);
  tab.beta = Vector(mr);
  tab.ub = Vector::Constant(ncol, inf);
  tab.ub.head(ns + mu) = ub;
  tab.state.assign(ncol, At::lower);
  tab.basis.resize(mr);
  Vector phase1 = Vector::Zero(ncol);
  Eigen::Index a = ns + mu;
  for (Eigen::Index k = 0; k < mr; ++k) {
    const Eigen::Index i = keep[k];
    tab.T.row(k).head(ns + mu) = S.row(i);
    tab.beta(k) = rhs(i);
    if (needs_art[k]) {
      tab.T(k, a) = 1.0;
      tab.basis[k] = a;
      phase1(a) = 1.0;
      ++a;
    } else {
      tab.basis[k] = ns + (i - me);
    }
    tab.state[tab.basis[k]] = At::basic;
  }

  // Phase one.
  if (na > 0) {
    tab.price(phase1);
    if (tab.optimise(opt) != Status::optimal) throw NumericalError("simplex: phase one unbounded", tab.iterations);
    double infeas = 0.0;
    for (Eigen::Index k = 0; k < tab.T.rows(); ++k)
      if (tab.basis[k] >= ns + mu) infeas += std::max(tab.beta(k), 0.0);
    res.infeasibility = infeas;
    res.iterations = tab.iterations;
    const double bscale = rhs.size() ? std::max(1.0, rhs.cwiseAbs().maxCoeff()) : 1.0;
    if (infeas > opt.feasibility * bscale) return res;
    // Drive the remaining artificials out of the basis, dropping redundant rows.
    for (Eigen::Index k = tab.T.rows() - 1; k >= 0; --k) {
      if (tab.basis[k] < ns + mu) continue;
      Eigen::Index best = -1;
      double bv = 1e-9;
      for (Eigen::Index j = 0; j < ns + mu; ++j)
        if (tab.state[j] != At::basic && tab.ub(j) > 0.0 && std::abs(tab.T(k, j)) > bv) {
          bv = std::abs(tab.T(k, j));
          best = j;
        }
      const Eigen::Index art = tab.basis[k];
      if (best < 0) {
        tab.drop_row(k);
      } else {
        const double v = tab.value(best);
        tab.d = Vector::Zero(ncol);
        tab.pivot(k, best);
        tab.basis[k] = best;
        tab.state[best] = At::basic;
        tab.beta(k) = v;
      }
      tab.state[art] = At::lower;
    }
    for (Eigen::Index j = ns + mu; j < ncol; ++j) {
      tab.ub(j) = 0.0;
      if (tab.state[j] == At::basic) tab.state[j] = At::lower;
    }
  }

  // Phase two.
  Vector c = Vector::Zero(ncol);
  for (Eigen::Index j = 0; j < nx; ++j) {
    const auto& vm = vars[j];
    switch (vm.kind) {
      case VarMap::shifted: c(vm.col) = pb.cost(j); break;
      case VarMap::reflected: c(vm.col) = -pb.cost(j); break;
      case VarMap::split: c(vm.col) = pb.cost(j); c(vm.col + 1) = -pb.cost(j); break;
    }
  }
  tab.price(c);
  const Status st = tab.optimise(opt);
  res.iterations = tab.iterations;
  if (st == Status::unbounded) {
    res.status = Status::unbounded;
    return res;
  }

  Vector y(ncol);
  for (Eigen::Index j = 0; j < ncol; ++j) y(j) = tab.value(j);
  for (Eigen::Index k = 0; k < tab.T.rows(); ++k) y(tab.basis[k]) = std::max(tab.beta(k), 0.0);
  res.x.resize(nx);
  for (Eigen::Index j = 0; j < nx; ++j) {
    const auto& vm = vars[j];
    switch (vm.kind) {
      case VarMap::shifted: res.x(j) = vm.offset + std::min(y(vm.col), tab.ub(vm.col)); break;
      case VarMap::reflected: res.x(j) = vm.offset - y(vm.col); break;
      case VarMap::split: res.x(j) = y(vm.col) - y(vm.col + 1); break;
    }
  }
  res.status = Status::optimal;
  res.objective = pb.cost.dot(res.x);
  return res;
}

}  // namespace reskit::lp
